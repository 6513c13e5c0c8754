#pragma once

// Interpolation densities, quadrature of the interpolation bound's
// right-hand side, the multi-operator trace-exponential corollary, and
// Lie-Trotter limits.

#include <optional>

#include "swivel/swivelopt.hpp"

namespace swivel {

struct DensityParams {
    double theta = 0.0;  // 0 encodes the limiting density beta_0
    std::optional<std::pair<double, double>> derivedFrom;  // (p, q), theta = q/p

    static DensityParams from_pq(double p, double q) {
        return {q / p, std::make_pair(p, q)};
    }
};

struct QuadratureConfig {
    double halfWidth = 0.0;   // 0 = choose T from the certified tail bound
    int panels = 0;           // 0 = auto from the half width
    int nodesPerPanel = 32;
    double tailEps = 1e-10;   // bound on |neglected tail * integrand bound|
};

// beta_theta(t) = sin(pi theta) / (2 theta [cosh(pi t) + cos(pi theta)]).
double beta_density(double theta, double t);
// alpha_theta(t) = sin(pi theta) / (2 (1-theta) [cosh(pi t) - cos(pi theta)]).
double alpha_density(double theta, double t);
// beta_0(t) = pi / (2 [cosh(pi t) + 1]), the theta -> 0 limit of beta_theta.
double beta_zero_density(double t);

// Exact one-sided tail masses: integral of the density over [T, inf).
double beta_tail_mass(double theta, double T);
double alpha_tail_mass(double theta, double T);
double beta_zero_tail_mass(double T);

enum class DensityKind { Alpha, Beta, BetaZero };

// Composite Gauss-Legendre integral of the bare density over [-T, T]
// (normalization checks; no tail correction is added).
double integrate_density(DensityKind kind, double theta, double halfWidth,
                         int panels = 0, int nodesPerPanel = 32);

struct QuadratureResult {
    double value = 0.0;
    double errorEstimate = 0.0;  // |full - half resolution| + tail bound
    double tailBound = 0.0;      // certified |neglected tail| bound
    double halfWidth = 0.0;
    int panels = 0;
    int nodesPerPanel = 0;
    long clampCount = 0;         // nodes that hit the underflow floor
};

// log || C_1^{1/p} ... C_L^{1/p} ||_p^p at identity swivels; -inf when the
// product vanishes.
double hirschman_lhs(const ChainInstance& inst, double p);

// Quadrature of beta_{q/p}(t) log || prod_i C_i^{(1+it)/q} ||_q^q over the
// real line, with a certified tail bound folded into the error estimate.
// Throws IntegrandUnderflow when the q-norm hits the positive floor.
QuadratureResult hirschman_rhs(const ChainInstance& inst, double p, double q,
                               const QuadratureConfig& quad = {});

enum class VerifyStatus { HOLDS, VIOLATED_BEYOND_TOL, INCONCLUSIVE_OPTIMIZER_GAP };
const char* to_string(VerifyStatus s);

struct VerificationReport {
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    double tolerance = 0.0;
    VerifyStatus status = VerifyStatus::INCONCLUSIVE_OPTIMIZER_GAP;
    QuadratureResult quadrature{};
    // Monotonicity runs: the (p, value) curve and optional oracle values.
    std::vector<std::pair<double, double>> curve;
    std::vector<double> oracleCurve;
    std::vector<std::string> notes;
};

VerificationReport verify_hirschman(const ChainInstance& inst, double p, double q,
                                    const QuadratureConfig& quad = {},
                                    double tol = tolerances().holdsTol);

// log Tr exp(log C_1 + ... + log C_L); requires positive definite operators.
double gt_lhs(const ChainInstance& inst);

VerificationReport verify_gt(const ChainInstance& inst, double q,
                             const QuadratureConfig& quad = {},
                             double tol = tolerances().holdsTol);

// Tr{ [C_L^{1/2p} ... C_2^{1/2p} C_1^{1/p} C_2^{1/2p} ... C_L^{1/2p}]^p }.
double lie_trotter_value(const ChainInstance& inst, double p);

struct TrotterPoint {
    double p = 0.0;
    double value = 0.0;
    double error = 0.0;  // |value - Tr exp sum log C_i|
};

std::vector<TrotterPoint> lie_trotter_convergence(const ChainInstance& inst,
                                                  const std::vector<double>& pList);

}  // namespace swivel
