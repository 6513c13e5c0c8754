#pragma once

// Dense complex matrix arithmetic and functional calculus on positive
// semi-definite operators: real/complex powers on the support, log/exp,
// Schatten norms, singular values, partial traces and factor embeddings.

#include <set>

#include "swivel/types.hpp"

namespace swivel {

// A positive semi-definite operator stored through its spectral
// decomposition. Eigenvalues are descending; eigenvector columns are
// orthonormal. Immutable after construction.
class PsdOperator {
  public:
    PsdOperator(RealVector eigenvalues, ComplexMatrix eigenvectors,
                double supportCutoff);

    int dim() const { return static_cast<int>(eigenvalues_.size()); }
    const RealVector& eigenvalues() const { return eigenvalues_; }
    const ComplexMatrix& eigenvectors() const { return eigenvectors_; }
    double supportCutoff() const { return supportCutoff_; }

    // Number of eigenvalues strictly above the support cutoff.
    int supportRank() const;

    // Dense form U L U^*, computed once at construction.
    const ComplexMatrix& matrix() const { return dense_; }

    double trace() const { return eigenvalues_.sum(); }
    double lambdaMax() const { return dim() > 0 ? eigenvalues_(0) : 0.0; }

  private:
    RealVector eigenvalues_;
    ComplexMatrix eigenvectors_;
    double supportCutoff_;
    ComplexMatrix dense_;
};

// Decomposes a Hermitian PSD matrix. Symmetrizes within tolerance first;
// throws NonHermitian / NegativeSpectrum / EigensolverFailure.
PsdOperator spectral_decompose(const ComplexMatrix& M,
                               double supportCutoffRel = tolerances().supportCutoffRel);

// C^a with the power taken on the support only (pseudo-power for a < 0).
ComplexMatrix real_power(const PsdOperator& C, double a);

// C^{(a+it)/q} = U diag(l^{a/q} e^{i (t/q) ln l}) U^* on the support.
ComplexMatrix complex_power(const PsdOperator& C, double a, double t, double q);

struct LogResult {
    ComplexMatrix value;       // Hermitian log, kernel mapped to zero
    bool rankDeficient = false;
};

// Support-restricted matrix log; flags rank deficiency instead of throwing.
LogResult log_on_support(const PsdOperator& C);

// exp of a Hermitian matrix via spectral calculus. Throws NonHermitian.
ComplexMatrix matrix_exp(const ComplexMatrix& H);

// Descending singular values.
RealVector singular_values(const ComplexMatrix& X);

// Schatten p-norm, p in [1, inf]. Pass kInfinity for the operator norm.
double schatten_norm(const ComplexMatrix& X, double p);

// Partial trace over the factors listed in tracedFactors (0-based indices
// into shape.factorDims). Kept factors preserve the original order.
ComplexMatrix partial_trace(const ComplexMatrix& M, const TensorShape& shape,
                            const std::set<int>& tracedFactors);

// Embeds an operator acting on the listed factors (in order) into the full
// product space, identity on the remaining factors.
ComplexMatrix embed_on_factors(const ComplexMatrix& X, const TensorShape& shape,
                               const std::vector<int>& factors);

// Entrywise max |.| norm and Frobenius norm helpers.
double max_abs(const ComplexMatrix& M);
bool is_hermitian(const ComplexMatrix& M, double relTol = tolerances().hermitianCheckRel);

}  // namespace swivel
