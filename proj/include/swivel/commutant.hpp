#pragma once

// Structure of the unitaries commuting with a PSD operator: eigenvalue
// clustering, per-cluster eigenspace bases, and block-unitary swivel
// assembly / random sampling / validation.

#include <cstdint>

#include "swivel/matcore.hpp"

namespace swivel {

struct EigenvalueClustering {
    // Half-open index ranges [first, last) into the descending eigenvalue
    // array; ranges partition {0..n-1} in order.
    std::vector<std::pair<int, int>> clusters;
    std::vector<double> representatives;  // mean eigenvalue per cluster
    double tolerance = 0.0;               // absolute gap threshold used

    int clusterCount() const { return static_cast<int>(clusters.size()); }
    int clusterSize(int k) const { return clusters[k].second - clusters[k].first; }
};

struct CommutantStructure {
    PsdOperator source;
    EigenvalueClustering clustering;
    std::vector<ComplexMatrix> blockBases;  // n x m_k isometries per cluster

    int blockCount() const { return static_cast<int>(blockBases.size()); }
    int blockSize(int k) const { return static_cast<int>(blockBases[k].cols()); }
    // Real dimension of the commutant's unitary part: sum of m_k^2.
    int realDimension() const;
    bool allScalarBlocks() const;
};

// Per-position block unitaries: blocks[i][k] is the m_k x m_k unitary for
// cluster k of chain operator i.
struct SwivelAssignment {
    std::vector<std::vector<ComplexMatrix>> blocks;
};

// Greedy sweep over the descending eigenvalue list; a new cluster starts
// when the gap to the previous eigenvalue exceeds relTol*max(1, lambda_max).
EigenvalueClustering cluster_eigenvalues(const PsdOperator& C,
                                         double relTol = tolerances().clusterRelTol);

CommutantStructure commutant_structure(const PsdOperator& C,
                                       double relTol = tolerances().clusterRelTol);

// V = sum_k B_k U_k B_k^*; throws ShapeMismatch / NonUnitaryBlock.
ComplexMatrix assemble_swivel(const CommutantStructure& S,
                              const std::vector<ComplexMatrix>& blocks);

// Haar-like random block unitaries for one operator, deterministic per seed.
std::vector<ComplexMatrix> random_swivel(const CommutantStructure& S, std::uint64_t seed);

// ||VC - CV||_F / max(1, ||C||_F).
double verify_commutation(const ComplexMatrix& V, const PsdOperator& C);

// Haar-like n x n unitary (QR of a complex Gaussian with the phase fix),
// deterministic per seed. Shared by random_swivel and the generators.
ComplexMatrix random_unitary(int n, std::uint64_t seed);

class GaussianStream;
ComplexMatrix haar_unitary(int n, GaussianStream& stream);

}  // namespace swivel
