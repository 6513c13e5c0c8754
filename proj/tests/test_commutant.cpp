#include "swivel/commutant.hpp"

#include "test_support.hpp"

using namespace swivel;
using testutil::diag;

TEST_CASE("cluster_eigenvalues: gaps and merges") {
    PsdOperator C = spectral_decompose(diag({5.0, 5.0, 2.0}));
    EigenvalueClustering cl = cluster_eigenvalues(C, 1e-8);
    REQUIRE(cl.clusterCount() == 2);
    CHECK(cl.clusterSize(0) == 2);
    CHECK(cl.clusterSize(1) == 1);
    CHECK(cl.representatives[0] == doctest::Approx(5.0));

    PsdOperator E = spectral_decompose(3.0 * ComplexMatrix::Identity(4, 4));
    CHECK(cluster_eigenvalues(E).clusterCount() == 1);

    // hand-enumerated sweep: descending (1+2tau, 1+tau/2, 1)
    double relTol = 1e-8;
    double tau = relTol * 1.0;  // lambda_max close to 1 => tau = relTol*max(1,~1)
    PsdOperator F = spectral_decompose(diag({1.0, 1.0 + tau / 2.0, 1.0 + 2.0 * tau}));
    EigenvalueClustering fc = cluster_eigenvalues(F, relTol);
    REQUIRE(fc.clusterCount() == 2);
    CHECK(fc.clusterSize(0) == 1);  // 1+2tau alone
    CHECK(fc.clusterSize(1) == 2);  // 1+tau/2 and 1 merge
}

TEST_CASE("cluster_eigenvalues: idempotence on representatives") {
    for (std::uint64_t seed : {5u, 6u}) {
        PsdOperator C = spectral_decompose(testutil::random_psd(5, seed));
        EigenvalueClustering cl = cluster_eigenvalues(C);
        RealVector reps(cl.clusterCount());
        for (int k = 0; k < cl.clusterCount(); ++k) reps(k) = cl.representatives[k];
        PsdOperator R(reps, ComplexMatrix::Identity(cl.clusterCount(), cl.clusterCount()),
                      0.0);
        EigenvalueClustering again = cluster_eigenvalues(R);
        CHECK(again.clusterCount() == cl.clusterCount());
        for (int k = 0; k < again.clusterCount(); ++k) CHECK(again.clusterSize(k) == 1);
    }
}

TEST_CASE("commutant_structure: block layout") {
    PsdOperator C = spectral_decompose(diag({3.0, 2.0, 1.0}));
    CommutantStructure S = commutant_structure(C);
    CHECK(S.blockCount() == 3);
    CHECK(S.allScalarBlocks());
    CHECK(S.realDimension() == 3);

    PsdOperator E = spectral_decompose(2.5 * ComplexMatrix::Identity(3, 3));
    CommutantStructure SE = commutant_structure(E);
    CHECK(SE.blockCount() == 1);
    CHECK(SE.blockSize(0) == 3);
    CHECK(SE.realDimension() == 9);

    // rank-1 projector in dim 3: blocks of size 1 and 2
    ComplexMatrix v = testutil::random_gaussian(3, 1, 9);
    v.normalize();
    PsdOperator P = spectral_decompose(ComplexMatrix(v * v.adjoint()));
    CommutantStructure SP = commutant_structure(P);
    REQUIRE(SP.blockCount() == 2);
    CHECK(SP.blockSize(0) == 1);
    CHECK(SP.blockSize(1) == 2);
    ComplexMatrix V = assemble_swivel(SP, random_swivel(SP, 123));
    CHECK(verify_commutation(V, P) <= 1e-8);
}

TEST_CASE("assemble_swivel: identity, full block, phases") {
    PsdOperator C = spectral_decompose(testutil::random_psd(3, 15));
    CommutantStructure S = commutant_structure(C);
    std::vector<ComplexMatrix> id;
    for (int k = 0; k < S.blockCount(); ++k)
        id.push_back(ComplexMatrix::Identity(S.blockSize(k), S.blockSize(k)));
    CHECK(max_abs(assemble_swivel(S, id) - ComplexMatrix::Identity(3, 3)) <= 1e-12);

    PsdOperator E = spectral_decompose(2.0 * ComplexMatrix::Identity(3, 3));
    CommutantStructure SE = commutant_structure(E);
    ComplexMatrix U = random_unitary(3, 77);
    CHECK(max_abs(assemble_swivel(SE, {U}) - U) <= 1e-12);

    // distinct spectrum with phase blocks: V = U diag(e^{i phi}) U^*
    CommutantStructure SD = commutant_structure(C);
    REQUIRE(SD.allScalarBlocks());
    std::vector<ComplexMatrix> phases;
    for (int k = 0; k < SD.blockCount(); ++k)
        phases.push_back(ComplexMatrix::Constant(1, 1, std::polar(1.0, 0.3 * (k + 1))));
    ComplexMatrix V = assemble_swivel(SD, phases);
    CHECK(verify_commutation(V, C) <= 1e-10);
    CHECK(max_abs(V.adjoint() * V - ComplexMatrix::Identity(3, 3)) <= 1e-9);

    CHECK_THROWS_AS(assemble_swivel(SD, {phases[0]}), ShapeMismatch);
    std::vector<ComplexMatrix> bad = phases;
    bad[0] = ComplexMatrix::Constant(1, 1, 2.0);
    CHECK_THROWS_AS(assemble_swivel(SD, bad), NonUnitaryBlock);
}

TEST_CASE("random_swivel: determinism and unit phases") {
    PsdOperator C = spectral_decompose(diag({4.0, 3.0, 1.0}));
    CommutantStructure S = commutant_structure(C);
    auto b1 = random_swivel(S, 42);
    auto b2 = random_swivel(S, 42);
    REQUIRE(b1.size() == b2.size());
    for (size_t k = 0; k < b1.size(); ++k) {
        CHECK((b1[k] - b2[k]).norm() == 0.0);  // bit-identical per seed
        CHECK(std::abs(std::abs(b1[k](0, 0)) - 1.0) <= 1e-12);
    }
    auto b3 = random_swivel(S, 43);
    CHECK((b1[0] - b3[0]).norm() > 1e-3);
}

TEST_CASE("random_swivel: Monte-Carlo mean of a size-2 block is near zero") {
    PsdOperator E = spectral_decompose(ComplexMatrix::Identity(2, 2));
    CommutantStructure S = commutant_structure(E);
    ComplexMatrix mean = ComplexMatrix::Zero(2, 2);
    const int samples = 10000;
    for (int s = 0; s < samples; ++s) mean += random_swivel(S, 1000 + s)[0];
    mean /= static_cast<double>(samples);
    CHECK(max_abs(mean) <= 0.05);
}

TEST_CASE("verify_commutation: residual scale") {
    PsdOperator C = spectral_decompose(testutil::random_psd(4, 19));
    CHECK(verify_commutation(ComplexMatrix::Identity(4, 4), C) <= 1e-15);

    CommutantStructure S = commutant_structure(C);
    ComplexMatrix V = assemble_swivel(S, random_swivel(S, 7));
    CHECK(verify_commutation(V, C) <= 1e-10);

    // generic non-commuting unitaries sit far from the commutant
    int hits = 0;
    for (int s = 0; s < 100; ++s)
        if (verify_commutation(random_unitary(4, 5000 + s), C) > 1e-3) ++hits;
    CHECK(hits == 100);

    CHECK_THROWS_AS(verify_commutation(ComplexMatrix::Identity(3, 3), C), ShapeMismatch);
}

TEST_CASE("assembled swivels: unitarity and commutation across random structures") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        ComplexMatrix M = testutil::random_psd(4, 100 + seed);
        if (seed % 2 == 0) {
            // inject degeneracy: repeat an eigenvalue exactly
            PsdOperator C0 = spectral_decompose(M);
            RealVector ev = C0.eigenvalues();
            ev(1) = ev(0);
            M = C0.eigenvectors() * ev.asDiagonal() * C0.eigenvectors().adjoint();
        }
        PsdOperator C = spectral_decompose(0.5 * (M + M.adjoint()));
        CommutantStructure S = commutant_structure(C);
        ComplexMatrix V = assemble_swivel(S, random_swivel(S, seed));
        CHECK(max_abs(V.adjoint() * V - ComplexMatrix::Identity(4, 4)) <= 1e-9);
        CHECK(verify_commutation(V, C) <= 1e-8);

        int sum = 0;
        for (int k = 0; k < S.blockCount(); ++k) sum += S.blockSize(k) * S.blockSize(k);
        CHECK(sum == S.realDimension());
    }
}

TEST_CASE("distinct spectrum: swivels are diagonal in the eigenbasis") {
    PsdOperator C = spectral_decompose(testutil::random_psd(4, 131));
    CommutantStructure S = commutant_structure(C);
    REQUIRE(S.allScalarBlocks());
    ComplexMatrix V = assemble_swivel(S, random_swivel(S, 3));
    ComplexMatrix inBasis = C.eigenvectors().adjoint() * V * C.eigenvectors();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) CHECK(std::abs(inBasis(i, j)) <= 1e-10);
}
