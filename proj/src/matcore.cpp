#include "swivel/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace swivel {

Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

namespace {

void require_finite(const ComplexMatrix& M, const char* what) {
    if (!M.allFinite()) throw Error(std::string(what) + ": non-finite entries");
}

}  // namespace

double max_abs(const ComplexMatrix& M) {
    return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& M, double relTol) {
    if (M.rows() != M.cols()) return false;
    double scale = std::max(1.0, max_abs(M));
    return max_abs(M - M.adjoint()) <= relTol * scale;
}

PsdOperator::PsdOperator(RealVector eigenvalues, ComplexMatrix eigenvectors,
                         double supportCutoff)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      supportCutoff_(supportCutoff) {
    const int n = static_cast<int>(eigenvalues_.size());
    if (eigenvectors_.rows() != n || eigenvectors_.cols() != n)
        throw ShapeMismatch("PsdOperator: eigenvector matrix must be n x n");
    if (n == 0) throw ShapeMismatch("PsdOperator: empty operator");
    require_finite(eigenvectors_, "PsdOperator");
    if (!eigenvalues_.allFinite())
        throw Error("PsdOperator: non-finite eigenvalues");

    const double lmax = eigenvalues_.maxCoeff();
    const double clampWindow = tolerances().negativeEigRel * std::max(1.0, lmax);
    for (int i = 0; i < n; ++i) {
        if (eigenvalues_(i) < -clampWindow)
            throw NegativeSpectrum("PsdOperator: eigenvalue " +
                                   std::to_string(eigenvalues_(i)) +
                                   " below the PSD clamp window");
        if (eigenvalues_(i) < 0.0) eigenvalues_(i) = 0.0;
    }
    for (int i = 0; i + 1 < n; ++i)
        if (eigenvalues_(i) < eigenvalues_(i + 1))
            throw Error("PsdOperator: eigenvalues must be descending");

    ComplexMatrix gram = eigenvectors_.adjoint() * eigenvectors_;
    gram -= ComplexMatrix::Identity(n, n);
    if (max_abs(gram) > 10 * tolerances().unitarityTol)
        throw Error("PsdOperator: eigenvector columns are not orthonormal");

    dense_ = eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.adjoint();
}

int PsdOperator::supportRank() const {
    int r = 0;
    for (int i = 0; i < dim(); ++i)
        if (eigenvalues_(i) > supportCutoff_) ++r;
    return r;
}

PsdOperator spectral_decompose(const ComplexMatrix& M, double supportCutoffRel) {
    if (M.rows() != M.cols())
        throw ShapeMismatch("spectral_decompose: matrix must be square");
    require_finite(M, "spectral_decompose");
    if (!is_hermitian(M))
        throw NonHermitian("spectral_decompose: input fails the symmetry check");

    ComplexMatrix H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(H);
    if (solver.info() != Eigen::Success)
        throw EigensolverFailure("spectral_decompose: eigensolver did not converge");

    const int n = static_cast<int>(M.rows());
    // Eigen returns ascending order; store descending. The sort is stable so
    // degenerate eigenspaces keep the solver's column order (identity input
    // keeps the identity basis).
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return solver.eigenvalues()(a) > solver.eigenvalues()(b);
    });
    RealVector evals(n);
    ComplexMatrix evecs(n, n);
    for (int i = 0; i < n; ++i) {
        evals(i) = solver.eigenvalues()(order[i]);
        evecs.col(i) = solver.eigenvectors().col(order[i]);
    }

    const double lmax = evals(0);
    if (evals(n - 1) < -tolerances().negativeEigRel * std::max(1.0, lmax))
        throw NegativeSpectrum("spectral_decompose: spectrum extends below the PSD window");

    const double cutoff = supportCutoffRel * std::max(0.0, lmax);
    PsdOperator out(std::move(evals), std::move(evecs), cutoff);

    double scale = std::max(1.0, H.norm());
    if ((out.matrix() - H).norm() > tolerances().reconstructRel * scale)
        throw EigensolverFailure("spectral_decompose: reconstruction residual too large");
    return out;
}

ComplexMatrix real_power(const PsdOperator& C, double a) {
    const int n = C.dim();
    RealVector f(n);
    for (int i = 0; i < n; ++i) {
        double l = C.eigenvalues()(i);
        f(i) = (l > C.supportCutoff()) ? std::pow(l, a) : 0.0;
    }
    return C.eigenvectors() * f.asDiagonal() * C.eigenvectors().adjoint();
}

ComplexMatrix complex_power(const PsdOperator& C, double a, double t, double q) {
    if (q < 1.0) throw InvalidExponent("complex_power: q must be >= 1");
    const int n = C.dim();
    Eigen::VectorXcd f(n);
    for (int i = 0; i < n; ++i) {
        double l = C.eigenvalues()(i);
        if (l > C.supportCutoff()) {
            double ll = std::log(l);
            f(i) = std::exp(a / q * ll) * std::polar(1.0, t / q * ll);
        } else {
            f(i) = 0.0;
        }
    }
    return C.eigenvectors() * f.asDiagonal() * C.eigenvectors().adjoint();
}

LogResult log_on_support(const PsdOperator& C) {
    const int n = C.dim();
    RealVector f(n);
    bool deficient = false;
    for (int i = 0; i < n; ++i) {
        double l = C.eigenvalues()(i);
        if (l > C.supportCutoff()) {
            f(i) = std::log(l);
        } else {
            f(i) = 0.0;
            deficient = true;
        }
    }
    LogResult out;
    out.value = C.eigenvectors() * f.asDiagonal() * C.eigenvectors().adjoint();
    out.rankDeficient = deficient;
    return out;
}

ComplexMatrix matrix_exp(const ComplexMatrix& H) {
    if (H.rows() != H.cols())
        throw ShapeMismatch("matrix_exp: matrix must be square");
    require_finite(H, "matrix_exp");
    if (!is_hermitian(H))
        throw NonHermitian("matrix_exp: input fails the symmetry check");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (H + H.adjoint()));
    if (solver.info() != Eigen::Success)
        throw EigensolverFailure("matrix_exp: eigensolver did not converge");
    RealVector e = solver.eigenvalues().array().exp();
    return solver.eigenvectors() * e.asDiagonal() * solver.eigenvectors().adjoint();
}

RealVector singular_values(const ComplexMatrix& X) {
    require_finite(X, "singular_values");
    Eigen::JacobiSVD<ComplexMatrix> svd(X);
    if (svd.info() != Eigen::Success)
        throw SvdFailure("singular_values: SVD did not converge");
    return svd.singularValues();
}

double schatten_norm(const ComplexMatrix& X, double p) {
    if (!(p >= 1.0))
        throw InvalidExponent("schatten_norm: p must be >= 1 (or infinity)");
    RealVector s = singular_values(X);
    if (s.size() == 0) return 0.0;
    if (std::isinf(p)) return s(0);
    if (p == 1.0) return s.sum();
    if (p == 2.0) return std::sqrt(s.squaredNorm());
    double smax = s(0);
    if (smax == 0.0) return 0.0;
    // Scale by the largest singular value to dodge overflow for large p.
    double acc = 0.0;
    for (int i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, p);
    return smax * std::pow(acc, 1.0 / p);
}

namespace {

struct FactorIndexer {
    std::vector<int> dims;
    std::vector<int> strides;  // row-major over factors, factor 0 slowest

    explicit FactorIndexer(const TensorShape& shape) : dims(shape.factorDims) {
        strides.assign(dims.size(), 1);
        for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
            strides[i] = strides[i + 1] * dims[i + 1];
    }

    int flatten(const std::vector<int>& idx) const {
        int f = 0;
        for (size_t i = 0; i < dims.size(); ++i) f += idx[i] * strides[i];
        return f;
    }
};

bool next_multi_index(std::vector<int>& idx, const std::vector<int>& dims) {
    for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
        if (++idx[i] < dims[i]) return true;
        idx[i] = 0;
    }
    return false;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& M, const TensorShape& shape,
                            const std::set<int>& tracedFactors) {
    const int K = static_cast<int>(shape.factorDims.size());
    if (M.rows() != M.cols() || M.rows() != shape.dim())
        throw ShapeMismatch("partial_trace: matrix dim does not match tensor shape");
    for (int f : tracedFactors)
        if (f < 0 || f >= K) throw ShapeMismatch("partial_trace: factor index out of range");

    std::vector<int> kept;
    std::vector<int> traced(tracedFactors.begin(), tracedFactors.end());
    for (int i = 0; i < K; ++i)
        if (!tracedFactors.count(i)) kept.push_back(i);

    FactorIndexer full(shape);
    std::vector<int> keptDims, tracedDims;
    for (int i : kept) keptDims.push_back(shape.factorDims[i]);
    for (int i : traced) tracedDims.push_back(shape.factorDims[i]);
    int keptDim = 1;
    for (int d : keptDims) keptDim *= d;

    ComplexMatrix out = ComplexMatrix::Zero(keptDim, keptDim);
    std::vector<int> rowIdx(K, 0), colIdx(K, 0);

    std::vector<int> kr(kept.size(), 0), kc(kept.size(), 0), tr(traced.size(), 0);
    auto keptFlat = [&](const std::vector<int>& kidx) {
        int f = 0, stride = 1;
        for (int i = static_cast<int>(kidx.size()) - 1; i >= 0; --i) {
            f += kidx[i] * stride;
            stride *= keptDims[i];
        }
        return f;
    };

    bool moreR = true;
    std::fill(kr.begin(), kr.end(), 0);
    while (moreR) {
        bool moreC = true;
        std::fill(kc.begin(), kc.end(), 0);
        while (moreC) {
            Complex acc = 0.0;
            std::fill(tr.begin(), tr.end(), 0);
            bool moreT = true;
            while (moreT) {
                for (size_t i = 0; i < kept.size(); ++i) {
                    rowIdx[kept[i]] = kr[i];
                    colIdx[kept[i]] = kc[i];
                }
                for (size_t i = 0; i < traced.size(); ++i) {
                    rowIdx[traced[i]] = tr[i];
                    colIdx[traced[i]] = tr[i];
                }
                acc += M(full.flatten(rowIdx), full.flatten(colIdx));
                moreT = !traced.empty() && next_multi_index(tr, tracedDims);
            }
            out(keptFlat(kr), keptFlat(kc)) = acc;
            moreC = !kept.empty() && next_multi_index(kc, keptDims);
        }
        moreR = !kept.empty() && next_multi_index(kr, keptDims);
    }
    return out;
}

ComplexMatrix embed_on_factors(const ComplexMatrix& X, const TensorShape& shape,
                               const std::vector<int>& factors) {
    const int K = static_cast<int>(shape.factorDims.size());
    int xdim = 1;
    for (int f : factors) {
        if (f < 0 || f >= K) throw ShapeMismatch("embed_on_factors: factor index out of range");
        xdim *= shape.factorDims[f];
    }
    if (X.rows() != xdim || X.cols() != xdim)
        throw ShapeMismatch("embed_on_factors: operator dim does not match listed factors");

    const int n = shape.dim();
    FactorIndexer full(shape);
    std::vector<int> xDims;
    for (int f : factors) xDims.push_back(shape.factorDims[f]);
    auto xFlat = [&](const std::vector<int>& idx) {
        int out = 0, stride = 1;
        for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
            out += idx[i] * stride;
            stride *= xDims[i];
        }
        return out;
    };

    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    std::vector<int> rowIdx(K, 0);
    bool more = true;
    while (more) {
        std::vector<int> xRow(factors.size());
        for (size_t i = 0; i < factors.size(); ++i) xRow[i] = rowIdx[factors[i]];
        std::vector<int> colIdx = rowIdx;
        std::vector<int> xCol(factors.size(), 0);
        // Vary only the embedded factors on the column side.
        bool moreCol = true;
        while (moreCol) {
            for (size_t i = 0; i < factors.size(); ++i) colIdx[factors[i]] = xCol[i];
            out(full.flatten(rowIdx), full.flatten(colIdx)) = X(xFlat(xRow), xFlat(xCol));
            moreCol = next_multi_index(xCol, xDims);
        }
        more = next_multi_index(rowIdx, full.dims);
    }
    return out;
}

}  // namespace swivel
