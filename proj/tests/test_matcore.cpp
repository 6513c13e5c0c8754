#include "swivel/matcore.hpp"

#include "test_support.hpp"

using namespace swivel;
using testutil::diag;

TEST_CASE("spectral_decompose: identity and diagonal") {
    PsdOperator I2 = spectral_decompose(ComplexMatrix::Identity(2, 2));
    CHECK(I2.eigenvalues()(0) == doctest::Approx(1.0));
    CHECK(I2.eigenvalues()(1) == doctest::Approx(1.0));

    PsdOperator D = spectral_decompose(diag({3.0, 0.0}));
    CHECK(D.eigenvalues()(0) == doctest::Approx(3.0));
    CHECK(D.eigenvalues()(1) == doctest::Approx(0.0));
    CHECK(D.supportRank() == 1);
}

TEST_CASE("spectral_decompose: random PSD reconstructs") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        ComplexMatrix M = testutil::random_psd(4, seed);
        PsdOperator C = spectral_decompose(M);
        CHECK((C.matrix() - M).norm() <= 1e-8 * std::max(1.0, M.norm()));
        ComplexMatrix gram = C.eigenvectors().adjoint() * C.eigenvectors();
        CHECK(max_abs(gram - ComplexMatrix::Identity(4, 4)) <= 1e-10);
    }
}

TEST_CASE("spectral_decompose: error paths") {
    ComplexMatrix bad(2, 2);
    bad << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(spectral_decompose(bad), NonHermitian);
    CHECK_THROWS_AS(spectral_decompose(diag({1.0, -1.0})), NegativeSpectrum);
    CHECK_THROWS_AS(spectral_decompose(ComplexMatrix::Identity(2, 3)), ShapeMismatch);
}

TEST_CASE("real_power: closed forms and pseudo-inverse") {
    PsdOperator C = spectral_decompose(diag({4.0, 9.0}));
    ComplexMatrix R = real_power(C, 0.5);
    CHECK(R(0, 0).real() == doctest::Approx(2.0));
    CHECK(R(1, 1).real() == doctest::Approx(3.0));

    PsdOperator S = spectral_decompose(diag({4.0, 0.0}));
    ComplexMatrix P = real_power(S, -1.0);
    CHECK(P(0, 0).real() == doctest::Approx(0.25));
    CHECK(P(1, 1).real() == doctest::Approx(0.0));
}

TEST_CASE("real_power: cube root round trip and composition") {
    ComplexMatrix M = testutil::random_psd(3, 7);
    PsdOperator C = spectral_decompose(M);
    ComplexMatrix R = real_power(C, 1.0 / 3.0);
    CHECK((R * R * R - M).norm() <= 1e-8 * std::max(1.0, M.norm()));

    for (double a : {-0.5, 1.0 / 3.0, 0.5, 1.0}) {
        for (double b : {-0.5, 0.5, 1.0}) {
            ComplexMatrix lhs = real_power(C, a) * real_power(C, b);
            ComplexMatrix rhs = real_power(C, a + b);
            CHECK((lhs - rhs).norm() <= 1e-8 * std::max(1.0, rhs.norm()));
        }
    }
}

TEST_CASE("complex_power: trivial exponents") {
    ComplexMatrix M = testutil::random_psd(3, 11);
    PsdOperator C = spectral_decompose(M);
    CHECK((complex_power(C, 1.0, 0.0, 1.0) - M).norm() <= 1e-9 * M.norm());

    PsdOperator E = spectral_decompose(diag({std::exp(1.0), 1.0}));
    ComplexMatrix W = complex_power(E, 0.0, M_PI, 1.0);
    CHECK(W(0, 0).real() == doctest::Approx(-1.0));
    CHECK(std::abs(W(0, 0).imag()) < 1e-12);
    CHECK(W(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("complex_power: modulus matches the real power") {
    PsdOperator C = spectral_decompose(testutil::random_psd(3, 13));
    RealVector sC = singular_values(complex_power(C, 1.0, 0.7, 2.0));
    RealVector sR = singular_values(real_power(C, 0.5));
    for (int i = 0; i < 3; ++i) CHECK(sC(i) == doctest::Approx(sR(i)).epsilon(1e-9));
}

TEST_CASE("complex_power: t-only factor is unitary on the support") {
    PsdOperator C = spectral_decompose(testutil::random_psd(4, 17));
    for (double t : {0.3, 1.0, 5.0}) {
        RealVector s = singular_values(complex_power(C, 0.0, t, 2.0));
        for (int i = 0; i < 4; ++i) CHECK(std::abs(s(i) - 1.0) <= 1e-9);
    }
}

TEST_CASE("log_on_support and matrix_exp") {
    PsdOperator I3 = spectral_decompose(ComplexMatrix::Identity(3, 3));
    CHECK(max_abs(log_on_support(I3).value) <= 1e-12);
    CHECK_FALSE(log_on_support(I3).rankDeficient);

    PsdOperator E = spectral_decompose(diag({std::exp(1.0), std::exp(2.0)}));
    ComplexMatrix LE = log_on_support(E).value;
    CHECK(LE(0, 0).real() == doctest::Approx(1.0));
    CHECK(LE(1, 1).real() == doctest::Approx(2.0));

    // round trip on a random PD matrix
    ComplexMatrix M = testutil::random_psd(3, 23);
    M += 0.1 * ComplexMatrix::Identity(3, 3);
    PsdOperator C = spectral_decompose(M);
    CHECK((matrix_exp(log_on_support(C).value) - M).norm() <= 1e-8 * M.norm());

    PsdOperator R = spectral_decompose(diag({2.0, 0.0}));
    CHECK(log_on_support(R).rankDeficient);

    CHECK(max_abs(matrix_exp(ComplexMatrix::Zero(3, 3)) -
                  ComplexMatrix::Identity(3, 3)) <= 1e-14);
    ComplexMatrix D = matrix_exp(diag({1.0, -1.0}));
    CHECK(D(0, 0).real() == doctest::Approx(std::exp(1.0)));
    CHECK(D(1, 1).real() == doctest::Approx(std::exp(-1.0)));

    ComplexMatrix H = testutil::random_hermitian(4, 29);
    ComplexMatrix prod = matrix_exp(H) * matrix_exp(ComplexMatrix(-H));
    CHECK(max_abs(prod - ComplexMatrix::Identity(4, 4)) <= 1e-9);

    ComplexMatrix bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(matrix_exp(bad), NonHermitian);
}

TEST_CASE("schatten_norm: closed forms") {
    CHECK(schatten_norm(ComplexMatrix::Identity(5, 5), 3.0) ==
          doctest::Approx(std::pow(5.0, 1.0 / 3.0)));
    ComplexMatrix D = diag({3.0, 4.0});
    CHECK(schatten_norm(D, 1.0) == doctest::Approx(7.0));
    CHECK(schatten_norm(D, kInfinity) == doctest::Approx(4.0));
    CHECK(schatten_norm(ComplexMatrix::Zero(3, 3), 2.0) == 0.0);
    CHECK_THROWS_AS(schatten_norm(D, 0.5), InvalidExponent);
}

TEST_CASE("schatten_norm: Frobenius oracle at p=2") {
    ComplexMatrix X = testutil::random_gaussian(4, 4, 31);
    CHECK(schatten_norm(X, 2.0) == doctest::Approx(testutil::frobenius_by_loop(X)));
}

TEST_CASE("schatten_norm: monotone in p, unitary invariant") {
    ComplexMatrix X = testutil::random_gaussian(4, 4, 37);
    std::vector<double> ps{1.0, 1.5, 2.0, 3.0, 5.0, 9.0, kInfinity};
    for (size_t i = 0; i + 1 < ps.size(); ++i)
        CHECK(schatten_norm(X, ps[i]) >= schatten_norm(X, ps[i + 1]) - 1e-10);

    ComplexMatrix U = random_unitary(4, 41);
    ComplexMatrix V = random_unitary(4, 43);
    for (double p : {1.0, 2.0, 3.7, kInfinity}) {
        double a = schatten_norm(U * X * V, p);
        double b = schatten_norm(X, p);
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, b));
    }
}

TEST_CASE("singular_values: basics and eigen-oracle") {
    RealVector s = singular_values(ComplexMatrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(s(i) == doctest::Approx(1.0));

    RealVector d = singular_values(diag({0.0, 5.0}));
    CHECK(d(0) == doctest::Approx(5.0));
    CHECK(d(1) == doctest::Approx(0.0));

    ComplexMatrix X = testutil::random_gaussian(4, 4, 47);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(X.adjoint() * X);
    RealVector sv = singular_values(X);
    for (int i = 0; i < 4; ++i) {
        double fromEig = std::sqrt(std::max(0.0, es.eigenvalues()(3 - i)));
        CHECK(std::abs(sv(i) * sv(i) - fromEig * fromEig) <= 1e-9);
    }
}

TEST_CASE("partial_trace: product state factorization") {
    ComplexMatrix rhoA = testutil::random_psd(2, 53);
    ComplexMatrix rhoB = testutil::random_psd(3, 59);
    ComplexMatrix M = testutil::kron(rhoA, rhoB);
    TensorShape shape{{2, 3}};

    ComplexMatrix trB = partial_trace(M, shape, {1});
    CHECK((trB - rhoA * rhoB.trace()).norm() <= 1e-12 * M.norm());

    ComplexMatrix trA = partial_trace(M, shape, {0});
    CHECK((trA - rhoB * rhoA.trace()).norm() <= 1e-12 * M.norm());

    ComplexMatrix all = partial_trace(M, shape, {0, 1});
    CHECK(all.rows() == 1);
    CHECK(all(0, 0).real() == doctest::Approx(M.trace().real()));
}

TEST_CASE("partial_trace: trace preservation, hermiticity, linearity") {
    ComplexMatrix rho = testutil::random_psd(4, 61);
    rho /= rho.trace().real();
    TensorShape shape{{2, 2}};
    ComplexMatrix red = partial_trace(rho, shape, {0});
    CHECK(std::abs(red.trace().real() - 1.0) <= 1e-12);
    CHECK(is_hermitian(red));

    // cross-check against the independent block-summing implementation
    CHECK((red - testutil::naive_trace_out_first(rho, 2, 2)).norm() <= 1e-13);

    ComplexMatrix A = testutil::random_gaussian(4, 4, 67);
    ComplexMatrix B = testutil::random_gaussian(4, 4, 71);
    ComplexMatrix lin = partial_trace(A + 2.0 * B, shape, {1});
    ComplexMatrix sep =
        partial_trace(A, shape, {1}) + 2.0 * partial_trace(B, shape, {1});
    CHECK((lin - sep).norm() <= 1e-12 * std::max(1.0, sep.norm()));

    CHECK_THROWS_AS(partial_trace(rho, TensorShape{{3, 2}}, {0}), ShapeMismatch);
}

TEST_CASE("embed_on_factors: consistency with kron") {
    TensorShape shape{{2, 3, 2}};
    ComplexMatrix X = testutil::random_gaussian(2, 2, 73);   // factor 2
    ComplexMatrix got = embed_on_factors(X, shape, {2});
    ComplexMatrix want = testutil::kron(testutil::kron(ComplexMatrix::Identity(2, 2),
                                                       ComplexMatrix::Identity(3, 3)),
                                        X);
    CHECK((got - want).norm() <= 1e-13);

    ComplexMatrix Y = testutil::random_gaussian(4, 4, 79);   // factors {0, 2}
    ComplexMatrix gotY = embed_on_factors(Y, shape, {0, 2});
    // oracle: permute a kron-built operator by swapping factor order by hand
    ComplexMatrix wantY = ComplexMatrix::Zero(12, 12);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 2; ++c)
                for (int a2 = 0; a2 < 2; ++a2)
                    for (int b2 = 0; b2 < 3; ++b2)
                        for (int c2 = 0; c2 < 2; ++c2) {
                            if (b != b2) continue;
                            wantY(a * 6 + b * 2 + c, a2 * 6 + b2 * 2 + c2) =
                                Y(a * 2 + c, a2 * 2 + c2);
                        }
    CHECK((gotY - wantY).norm() <= 1e-13);
}
