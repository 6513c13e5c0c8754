#include "swivel/commutant.hpp"

#include <Eigen/QR>
#include <cmath>

#include "swivel/rng.hpp"

namespace swivel {

int CommutantStructure::realDimension() const {
    int d = 0;
    for (int k = 0; k < blockCount(); ++k) d += blockSize(k) * blockSize(k);
    return d;
}

bool CommutantStructure::allScalarBlocks() const {
    for (int k = 0; k < blockCount(); ++k)
        if (blockSize(k) != 1) return false;
    return true;
}

EigenvalueClustering cluster_eigenvalues(const PsdOperator& C, double relTol) {
    if (relTol <= 0.0) throw DomainError("cluster_eigenvalues: relTol must be positive");
    const RealVector& ev = C.eigenvalues();
    const int n = C.dim();
    const double tau = relTol * std::max(1.0, C.lambdaMax());

    EigenvalueClustering out;
    out.tolerance = tau;
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i == n || ev(i - 1) - ev(i) > tau) {
            out.clusters.emplace_back(start, i);
            out.representatives.push_back(ev.segment(start, i - start).mean());
            start = i;
        }
    }
    return out;
}

CommutantStructure commutant_structure(const PsdOperator& C, double relTol) {
    CommutantStructure out{C, cluster_eigenvalues(C, relTol), {}};
    for (const auto& [first, last] : out.clustering.clusters)
        out.blockBases.push_back(C.eigenvectors().middleCols(first, last - first));
    return out;
}

ComplexMatrix assemble_swivel(const CommutantStructure& S,
                              const std::vector<ComplexMatrix>& blocks) {
    if (static_cast<int>(blocks.size()) != S.blockCount())
        throw ShapeMismatch("assemble_swivel: block count does not match cluster count");
    const int n = S.source.dim();
    ComplexMatrix V = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < S.blockCount(); ++k) {
        const int m = S.blockSize(k);
        const ComplexMatrix& U = blocks[k];
        if (U.rows() != m || U.cols() != m)
            throw ShapeMismatch("assemble_swivel: block " + std::to_string(k) +
                                " has the wrong shape");
        ComplexMatrix gram = U.adjoint() * U - ComplexMatrix::Identity(m, m);
        if (max_abs(gram) > tolerances().unitarityTol)
            throw NonUnitaryBlock("assemble_swivel: block " + std::to_string(k) +
                                  " is not unitary");
        V.noalias() += S.blockBases[k] * U * S.blockBases[k].adjoint();
    }
    return V;
}

ComplexMatrix haar_unitary(int n, GaussianStream& g) {
    ComplexMatrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = g.complexGaussian();
    Eigen::HouseholderQR<ComplexMatrix> qr(A);
    ComplexMatrix Q = qr.householderQ();
    ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    // Phase fix: make diag(R) real positive so the factorization is unique.
    for (int j = 0; j < n; ++j) {
        Complex d = R(j, j);
        double m = std::abs(d);
        Q.col(j) *= (m > 0.0) ? d / m : Complex(1.0, 0.0);
    }
    return Q;
}

ComplexMatrix random_unitary(int n, std::uint64_t seed) {
    GaussianStream g(seed);
    return haar_unitary(n, g);
}

std::vector<ComplexMatrix> random_swivel(const CommutantStructure& S, std::uint64_t seed) {
    GaussianStream g(seed);
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(S.blockCount());
    for (int k = 0; k < S.blockCount(); ++k)
        blocks.push_back(haar_unitary(S.blockSize(k), g));
    return blocks;
}

double verify_commutation(const ComplexMatrix& V, const PsdOperator& C) {
    if (V.rows() != C.dim() || V.cols() != C.dim())
        throw ShapeMismatch("verify_commutation: dimension mismatch");
    const ComplexMatrix& M = C.matrix();
    double resid = (V * M - M * V).norm();
    return resid / std::max(1.0, M.norm());
}

}  // namespace swivel
