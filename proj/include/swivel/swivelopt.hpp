#pragma once

// Chained-norm evaluation ||C_1^{1/p} V_1 ... C_L^{1/p} V_L||_p^p, its
// maximization over commutant-constrained swivels, p-sweeps, and the
// tripartite-marginal chain with a single swivel on the shared factor.

#include <cstdint>
#include <optional>

#include "swivel/commutant.hpp"

namespace swivel {

struct ChainInstance {
    std::vector<PsdOperator> operators;
    std::string label;
    std::uint64_t seed = 0;

    int length() const { return static_cast<int>(operators.size()); }
    int dim() const { return operators.empty() ? 0 : operators.front().dim(); }
    void validate() const;
};

struct TripartiteInstance {
    PsdOperator rho;
    TensorShape shape;  // exactly three factors
    std::string label;
    std::uint64_t seed = 0;
};

struct OptimizerConfig {
    int restarts = 8;
    int maxIters = 500;          // ascent cycles per restart
    double stepInit = 0.1;       // initial arc-length for the line search
    double convTolRel = 1e-9;    // relative gain per cycle below which we stop
    double fdStep = 1e-5;        // central-difference step per tangent coordinate
    std::uint64_t seed = 0;
};

struct OptResult {
    double value = 0.0;                 // maximized ||.||_p^p (certified lower bound)
    SwivelAssignment bestSwivels;
    std::vector<double> perRestartValues;
    bool converged = false;
    int iterations = 0;                 // cycles used by the best restart
    std::vector<double> objectiveTrace; // objective after each accepted step (best restart)
};

// Product norm at an explicit swivel assignment.
double chain_norm(const ChainInstance& inst, const SwivelAssignment& swivels, double p);

// Identity-swivel assignment matching the instance's commutant structures.
SwivelAssignment identity_swivels(const ChainInstance& inst);

// Blockwise Riemannian ascent over the commutant blocks, multi-restart
// (restart 0 starts from identity, the rest from Haar-like random points).
OptResult maximize_over_swivels(const ChainInstance& inst, double p,
                                const OptimizerConfig& cfg = {});

// Exhaustive grid over the scalar commutant phases; requires every operator
// to have all-singleton eigenvalue clusters. The phases of the first and
// last chain positions never change the norm (a swivel commuting with its
// operator factors out of |.|, and a trailing unitary drops), so only
// interior positions are gridded; the value is identical to the full grid.
double brute_force_phase_grid(const ChainInstance& inst, double p, int gridPoints);

struct SweepPoint {
    double p = 1.0;
    OptResult result;
};

// maximize_over_swivels at each grid point, then cross-seeds: every p's best
// swivels are re-evaluated at every other p and the per-p max is kept.
std::vector<SweepPoint> sweep_p(const ChainInstance& inst, const std::vector<double>& pGrid,
                                const OptimizerConfig& cfg = {});

// ||rhoAC^{1/p} V rhoC^{-1/p} rhoBC^{1/p}||_p^p on the tripartite space,
// with V acting on the third factor and commuting with rho_C.
double marginal_chain_value(const TripartiteInstance& inst, const ComplexMatrix& V_C,
                            double p);

OptResult marginal_chain_maximize(const TripartiteInstance& inst, double p,
                                  const OptimizerConfig& cfg = {});

// 1-D oracle for the marginal chain when rho_C has exactly two eigenvalue
// clusters: exhaustive scan over the single free relative phase.
double marginal_phase_grid(const TripartiteInstance& inst, double p, int gridPoints);

}  // namespace swivel
