#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace swivel {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Error hierarchy. Every failure mode of the library throws one of these.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonHermitian : Error { using Error::Error; };
struct NegativeSpectrum : Error { using Error::Error; };
struct EigensolverFailure : Error { using Error::Error; };
struct InvalidExponent : Error { using Error::Error; };
struct SvdFailure : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct NonUnitaryBlock : Error { using Error::Error; };
struct StructureMismatch : Error { using Error::Error; };
struct NonScalarCommutant : Error { using Error::Error; };
struct GridTooLarge : Error { using Error::Error; };
struct CommutationViolation : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct IntegrandUnderflow : Error {
    explicit IntegrandUnderflow(const std::string& msg, long count = 0)
        : Error(msg), underflowCount(count) {}
    long underflowCount;
};
struct InvalidSpec : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct SchemaVersionMismatch : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Global numeric tolerances. Defaults are the library contract; tests and the
// CLI may override them process-wide before any computation starts.
// ---------------------------------------------------------------------------

struct Tolerances {
    double hermitianCheckRel = 1e-9;   // symmetry gate for decompositions
    double negativeEigRel = 1e-10;     // clamp window for small negative eigenvalues
    double reconstructRel = 1e-8;      // U L U^* vs input residual
    double supportCutoffRel = 1e-12;   // eigenvalues below cutoff*lambda_max count as zero
    double unitarityTol = 1e-9;        // entrywise ||U^*U - I|| gate
    double commutationRel = 1e-8;      // ||VC - CV||_F / max(1, ||C||_F) gate
    double clusterRelTol = 1e-8;       // eigenvalue degeneracy detection
    double holdsTol = 1e-7;            // inequality slack tolerance for HOLDS
    double integrandFloor = 1e-300;    // q-norm underflow floor inside quadrature
    long long gridBudget = 500000000;  // brute-force grid evaluation cap
};

Tolerances& tolerances();

inline const char* toolVersion() { return "0.1.0"; }

// ---------------------------------------------------------------------------
// Tensor factorization annotation for operators on product spaces.
// Layout convention: factor 0 is the slowest index (row-major over factors).
// ---------------------------------------------------------------------------

struct TensorShape {
    std::vector<int> factorDims;

    int dim() const {
        int d = 1;
        for (int f : factorDims) d *= f;
        return d;
    }
};

}  // namespace swivel
