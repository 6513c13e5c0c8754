#pragma once

// Closed-form spectra for 2x2 and 3x3 problems. These back the exhaustive
// phase-grid oracle, which needs millions of evaluations per sweep; they are
// deliberately a different algorithm from the Jacobi SVD used everywhere
// else so the two routes can check each other.

#include <array>
#include <cmath>

#include "swivel/types.hpp"

namespace swivel {

// Descending eigenvalues of a 2x2 Hermitian matrix given (h00, h11, h01).
inline std::array<double, 2> herm_eigenvalues_2x2(double h00, double h11, Complex h01) {
    double tr = h00 + h11;
    double det = h00 * h11 - std::norm(h01);
    double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    double l0 = 0.5 * (tr + disc);
    double l1 = (l0 != 0.0) ? det / l0 : 0.5 * (tr - disc);
    if (l1 > l0) std::swap(l0, l1);
    return {l0, l1};
}

// Descending eigenvalues of a 3x3 complex Hermitian matrix (trigonometric
// solution of the characteristic cubic after shift and scale).
inline std::array<double, 3> herm_eigenvalues_3x3(const Eigen::Matrix3cd& A) {
    double d0 = A(0, 0).real(), d1 = A(1, 1).real(), d2 = A(2, 2).real();
    double q = (d0 + d1 + d2) / 3.0;
    double p1 = std::norm(A(0, 1)) + std::norm(A(0, 2)) + std::norm(A(1, 2));
    double p2 = (d0 - q) * (d0 - q) + (d1 - q) * (d1 - q) + (d2 - q) * (d2 - q) + 2.0 * p1;
    if (p2 <= 0.0) return {q, q, q};
    double p = std::sqrt(p2 / 6.0);

    // r = det((A - qI)/p) / 2, real for Hermitian input.
    double b0 = d0 - q, b1 = d1 - q, b2 = d2 - q;
    Complex a01 = A(0, 1), a02 = A(0, 2), a12 = A(1, 2);
    double det = b0 * b1 * b2 - b0 * std::norm(a12) - b1 * std::norm(a02) -
                 b2 * std::norm(a01) + 2.0 * (a01 * a12 * std::conj(a02)).real();
    double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);

    double phi = std::acos(r) / 3.0;
    double e0 = q + 2.0 * p * std::cos(phi);
    double e2 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e1 = 3.0 * q - e0 - e2;
    // e0 >= e1 >= e2 by construction of the trig solution.
    return {e0, e1, e2};
}

// Descending singular values via the closed-form eigenvalues of X^*X.
inline std::array<double, 2> singular_values_2x2(const Eigen::Matrix2cd& X) {
    Complex c0 = X(0, 0), c1 = X(1, 0), c2 = X(0, 1), c3 = X(1, 1);
    double h00 = std::norm(c0) + std::norm(c1);
    double h11 = std::norm(c2) + std::norm(c3);
    Complex h01 = std::conj(c0) * c2 + std::conj(c1) * c3;
    auto l = herm_eigenvalues_2x2(h00, h11, h01);
    return {std::sqrt(std::max(0.0, l[0])), std::sqrt(std::max(0.0, l[1]))};
}

inline std::array<double, 3> singular_values_3x3(const Eigen::Matrix3cd& X) {
    Eigen::Matrix3cd H = X.adjoint() * X;
    auto l = herm_eigenvalues_3x3(H);
    return {std::sqrt(std::max(0.0, l[0])), std::sqrt(std::max(0.0, l[1])),
            std::sqrt(std::max(0.0, l[2]))};
}

}  // namespace swivel
