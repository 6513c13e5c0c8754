#include "swivel/swivelopt.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

#include "swivel/smallsv.hpp"

namespace swivel {

void ChainInstance::validate() const {
    if (operators.empty()) throw StructureMismatch("ChainInstance: L must be >= 1");
    for (const auto& C : operators)
        if (C.dim() != dim())
            throw StructureMismatch("ChainInstance: operator dimensions differ");
}

namespace {

double sum_sv_pow(const RealVector& s, double p) {
    double acc = 0.0;
    for (int i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
    return acc;
}

// lambda^{p/2} for the sigma^2 eigenvalues coming out of the fast paths.
// The acceptance p-grid only needs sqrt/multiply chains.
double half_pow(double lambda, double p) {
    if (lambda <= 0.0) return 0.0;
    if (p == 2.0) return lambda;
    if (p == 4.0) return lambda * lambda;
    if (p == 6.0) return lambda * lambda * lambda;
    if (p == 8.0) return (lambda * lambda) * (lambda * lambda);
    if (p == 1.0) return std::sqrt(lambda);
    if (p == 3.0) return lambda * std::sqrt(lambda);
    if (p == 1.5) return std::sqrt(lambda * std::sqrt(lambda));
    return std::pow(lambda, 0.5 * p);
}

// ---------------------------------------------------------------------------
// Shared cyclic blockwise ascent over groups of commutant blocks.
// ---------------------------------------------------------------------------

struct AscentProblem {
    const std::vector<CommutantStructure>* structures;
    // Objective given the assembled unitary per group.
    std::function<double(const std::vector<ComplexMatrix>&)> objective;
};

ComplexMatrix expm_skew(const ComplexMatrix& S) {
    const int m = static_cast<int>(S.rows());
    if (m == 1) return ComplexMatrix::Constant(1, 1, std::exp(S(0, 0)));
    // iS is Hermitian; e^S = U e^{-i diag} U^*.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Complex(0, 1) * S);
    Eigen::VectorXcd phase(m);
    for (int i = 0; i < m; ++i) phase(i) = std::polar(1.0, -es.eigenvalues()(i));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

struct AscentState {
    std::vector<std::vector<ComplexMatrix>> blocks;   // per group, per cluster
    std::vector<ComplexMatrix> assembled;             // per group
    double value = 0.0;
};

class BlockAscent {
  public:
    BlockAscent(const AscentProblem& prob, const OptimizerConfig& cfg)
        : prob_(prob), cfg_(cfg) {}

    // Runs one restart from the given initial blocks. Returns the final state;
    // records accepted objective values into trace.
    AscentState run(std::vector<std::vector<ComplexMatrix>> initBlocks,
                    std::vector<double>& trace, bool& converged, int& cycles) {
        const auto& structs = *prob_.structures;
        AscentState st;
        st.blocks = std::move(initBlocks);
        st.assembled.resize(structs.size());
        for (size_t g = 0; g < structs.size(); ++g)
            st.assembled[g] = assemble_swivel(structs[g], st.blocks[g]);
        st.value = prob_.objective(st.assembled);
        trace.push_back(st.value);

        converged = false;
        cycles = 0;
        for (int cycle = 0; cycle < cfg_.maxIters; ++cycle) {
            ++cycles;
            double cycleStart = st.value;
            for (size_t g = 0; g < structs.size(); ++g)
                for (int k = 0; k < structs[g].blockCount(); ++k)
                    ascend_block(st, static_cast<int>(g), k, trace);
            double gain = st.value - cycleStart;
            if (gain <= cfg_.convTolRel * std::max(1.0, std::abs(cycleStart))) {
                converged = true;
                break;
            }
        }
        return st;
    }

  private:
    double eval_with_block(AscentState& st, int g, int k, const ComplexMatrix& trial) {
        ComplexMatrix saved = std::move(st.blocks[g][k]);
        st.blocks[g][k] = trial;
        ComplexMatrix savedAssembled = std::move(st.assembled[g]);
        st.assembled[g] = assemble_swivel((*prob_.structures)[g], st.blocks[g]);
        double f = prob_.objective(st.assembled);
        st.blocks[g][k] = std::move(saved);
        st.assembled[g] = std::move(savedAssembled);
        return f;
    }

    void commit_block(AscentState& st, int g, int k, ComplexMatrix trial, double f) {
        st.blocks[g][k] = std::move(trial);
        st.assembled[g] = assemble_swivel((*prob_.structures)[g], st.blocks[g]);
        st.value = f;
    }

    void ascend_block(AscentState& st, int g, int k, std::vector<double>& trace) {
        const ComplexMatrix& B = st.blocks[g][k];
        const int m = static_cast<int>(B.rows());
        const double h = cfg_.fdStep;

        // Central differences along the skew-Hermitian basis, applied as
        // closed-form right rotations of the block.
        ComplexMatrix grad = ComplexMatrix::Zero(m, m);  // skew-Hermitian
        double c = std::cos(h), s = std::sin(h);
        auto probe = [&](const ComplexMatrix& plus, const ComplexMatrix& minus) {
            return (eval_with_block(st, g, k, plus) - eval_with_block(st, g, k, minus)) /
                   (2.0 * h);
        };
        for (int j = 0; j < m; ++j) {
            ComplexMatrix plus = B, minus = B;
            plus.col(j) *= std::polar(1.0, h);
            minus.col(j) *= std::polar(1.0, -h);
            double gj = probe(plus, minus);
            grad(j, j) += Complex(0, gj);
        }
        for (int j = 0; j < m; ++j) {
            for (int l = j + 1; l < m; ++l) {
                // real rotation: d/dh of B*exp(h(E_jl - E_lj))
                ComplexMatrix plus = B, minus = B;
                plus.col(j) = c * B.col(j) - s * B.col(l);
                plus.col(l) = s * B.col(j) + c * B.col(l);
                minus.col(j) = c * B.col(j) + s * B.col(l);
                minus.col(l) = -s * B.col(j) + c * B.col(l);
                double gr = probe(plus, minus);
                grad(j, l) += gr;
                grad(l, j) -= gr;
                // imaginary rotation: d/dh of B*exp(h i(E_jl + E_lj))
                Complex is(0, s);
                plus.col(j) = c * B.col(j) + is * B.col(l);
                plus.col(l) = is * B.col(j) + c * B.col(l);
                minus.col(j) = c * B.col(j) - is * B.col(l);
                minus.col(l) = -is * B.col(j) + c * B.col(l);
                double gi = probe(plus, minus);
                grad(j, l) += Complex(0, gi);
                grad(l, j) += Complex(0, gi);
            }
        }

        double gnorm = grad.norm();
        if (gnorm <= 1e-13 * std::max(1.0, std::abs(st.value))) return;

        // Backtrack from stepInit until improvement; once improving, expand
        // the arc (nearly flat landscapes need steps far larger than the
        // gradient magnitude suggests).
        ComplexMatrix dir = grad / gnorm;
        double eta = cfg_.stepInit;
        for (int tries = 0; tries < 45 && eta > 1e-13; ++tries, eta *= 0.5) {
            ComplexMatrix trial = B * expm_skew(eta * dir);
            double f = eval_with_block(st, g, k, trial);
            if (f <= st.value) continue;
            while (eta < M_PI) {
                ComplexMatrix wider = B * expm_skew(2.0 * eta * dir);
                double fw = eval_with_block(st, g, k, wider);
                if (fw <= f) break;
                trial = std::move(wider);
                f = fw;
                eta *= 2.0;
            }
            commit_block(st, g, k, std::move(trial), f);
            trace.push_back(f);
            return;
        }
    }

    const AscentProblem& prob_;
    const OptimizerConfig& cfg_;
};

std::vector<std::vector<ComplexMatrix>> identity_blocks(
    const std::vector<CommutantStructure>& structs) {
    std::vector<std::vector<ComplexMatrix>> blocks(structs.size());
    for (size_t g = 0; g < structs.size(); ++g)
        for (int k = 0; k < structs[g].blockCount(); ++k)
            blocks[g].push_back(ComplexMatrix::Identity(structs[g].blockSize(k),
                                                        structs[g].blockSize(k)));
    return blocks;
}

std::vector<std::vector<ComplexMatrix>> random_blocks(
    const std::vector<CommutantStructure>& structs, std::uint64_t seed) {
    std::vector<std::vector<ComplexMatrix>> blocks(structs.size());
    for (size_t g = 0; g < structs.size(); ++g)
        blocks[g] = random_swivel(structs[g], seed * 1000003ULL + g);
    return blocks;
}

OptResult run_multistart(const AscentProblem& prob, const OptimizerConfig& cfg) {
    if (cfg.restarts < 1 || cfg.maxIters < 1 || !(cfg.stepInit > 0.0) ||
        !(cfg.convTolRel > 0.0) || !(cfg.fdStep > 0.0))
        throw DomainError("optimizer config: all fields must be positive");
    OptResult best;
    best.value = -kInfinity;
    BlockAscent ascent(prob, cfg);
    for (int r = 0; r < cfg.restarts; ++r) {
        auto init = (r == 0) ? identity_blocks(*prob.structures)
                             : random_blocks(*prob.structures, cfg.seed + r);
        std::vector<double> trace;
        bool converged = false;
        int cycles = 0;
        AscentState st = ascent.run(std::move(init), trace, converged, cycles);
        best.perRestartValues.push_back(st.value);
        if (st.value > best.value) {
            best.value = st.value;
            best.bestSwivels.blocks = std::move(st.blocks);
            best.converged = converged;
            best.iterations = cycles;
            best.objectiveTrace = std::move(trace);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Chain evaluation.
// ---------------------------------------------------------------------------

struct ChainEvaluator {
    std::vector<ComplexMatrix> powers;  // C_i^{1/p}
    double p;

    ChainEvaluator(const ChainInstance& inst, double pExp) : p(pExp) {
        if (!(pExp >= 1.0) || !std::isfinite(pExp))
            throw InvalidExponent("chain norm: p must be a finite real >= 1");
        inst.validate();
        for (const auto& C : inst.operators) powers.push_back(real_power(C, 1.0 / pExp));
    }

    double operator()(const std::vector<ComplexMatrix>& swivels) const {
        ComplexMatrix M = powers[0] * swivels[0];
        for (size_t i = 1; i < powers.size(); ++i) {
            M = M * powers[i];
            M = M * swivels[i];
        }
        return sum_sv_pow(singular_values(M), p);
    }
};

std::vector<CommutantStructure> chain_structures(const ChainInstance& inst) {
    std::vector<CommutantStructure> s;
    s.reserve(inst.operators.size());
    for (const auto& C : inst.operators) s.push_back(commutant_structure(C));
    return s;
}

}  // namespace

SwivelAssignment identity_swivels(const ChainInstance& inst) {
    SwivelAssignment out;
    out.blocks = identity_blocks(chain_structures(inst));
    return out;
}

double chain_norm(const ChainInstance& inst, const SwivelAssignment& swivels, double p) {
    auto structs = chain_structures(inst);
    if (swivels.blocks.size() != structs.size())
        throw StructureMismatch("chain_norm: swivel assignment length mismatch");
    ChainEvaluator eval(inst, p);
    std::vector<ComplexMatrix> assembled(structs.size());
    for (size_t g = 0; g < structs.size(); ++g) {
        try {
            assembled[g] = assemble_swivel(structs[g], swivels.blocks[g]);
        } catch (const ShapeMismatch& e) {
            throw StructureMismatch(std::string("chain_norm: ") + e.what());
        }
    }
    return eval(assembled);
}

OptResult maximize_over_swivels(const ChainInstance& inst, double p,
                                const OptimizerConfig& cfg) {
    auto structs = chain_structures(inst);
    ChainEvaluator eval(inst, p);
    AscentProblem prob{&structs, [&](const std::vector<ComplexMatrix>& V) { return eval(V); }};
    return run_multistart(prob, cfg);
}

double brute_force_phase_grid(const ChainInstance& inst, double p, int gridPoints) {
    if (gridPoints < 1) throw DomainError("brute_force_phase_grid: gridPoints must be >= 1");
    auto structs = chain_structures(inst);
    for (const auto& S : structs)
        if (!S.allScalarBlocks())
            throw NonScalarCommutant(
                "brute_force_phase_grid: operator has a degenerate eigenvalue cluster");

    const int n = inst.dim();
    const int L = inst.length();
    ChainEvaluator eval(inst, p);

    const int interior = std::max(0, L - 2);
    const int freePhases = interior * (n - 1);
    double evalsNeeded = std::pow(static_cast<double>(gridPoints), freePhases);
    if (evalsNeeded > static_cast<double>(tolerances().gridBudget))
        throw GridTooLarge("brute_force_phase_grid: grid of " +
                           std::to_string(evalsNeeded) + " evaluations exceeds the budget");

    // Reduced representation in the eigenbases: the norm equals that of
    // L1' R1 D2 K2 D3 K3 ... D_{L-1} K_{L-1} E with Li' = Lambda_i^{1/p},
    // R_i = U_i^* U_{i+1}, K_i = Li' R_i, E = L_L^{1/p}.
    std::vector<RealVector> lam(L);
    for (int i = 0; i < L; ++i) {
        lam[i] = RealVector(n);
        for (int j = 0; j < n; ++j) {
            double l = inst.operators[i].eigenvalues()(j);
            lam[i](j) = (l > inst.operators[i].supportCutoff()) ? std::pow(l, 1.0 / p) : 0.0;
        }
    }
    if (L == 1) return lam[0].array().pow(p).sum();

    ComplexMatrix head = lam[0].asDiagonal() *
                         (inst.operators[0].eigenvectors().adjoint() *
                          inst.operators[1].eigenvectors());
    std::vector<ComplexMatrix> K;  // per interior position
    for (int i = 1; i + 1 < L; ++i) {
        ComplexMatrix R = inst.operators[i].eigenvectors().adjoint() *
                          inst.operators[i + 1].eigenvectors();
        K.push_back(lam[i].asDiagonal() * R);
    }
    ComplexMatrix tail = lam[L - 1].asDiagonal();
    if (!K.empty()) {
        K.back() = K.back() * tail;
    } else {
        head = head * tail;
    }

    if (freePhases == 0) return sum_sv_pow(singular_values(head), p);

    std::vector<int> idx(freePhases, 0);
    std::vector<Complex> phase(gridPoints);
    for (int k = 0; k < gridPoints; ++k)
        phase[k] = std::polar(1.0, 2.0 * M_PI * k / gridPoints);

    auto advance = [&]() {
        for (int d = freePhases - 1; d >= 0; --d) {
            if (++idx[d] < gridPoints) return true;
            idx[d] = 0;
        }
        return false;
    };

    double bestVal = -kInfinity;

    // Fixed-size hot loops; the dynamic path covers larger dimensions.
    if (n == 2) {
        Eigen::Matrix2cd head2 = head, scaled, M;
        std::vector<Eigen::Matrix2cd> K2(K.begin(), K.end());
        do {
            M = head2;
            for (int g = 0; g < interior; ++g) {
                scaled = K2[g];
                scaled.row(1) *= phase[idx[g]];
                M = M * scaled;
            }
            auto sv = singular_values_2x2(M);
            double val = half_pow(sv[0] * sv[0], p) + half_pow(sv[1] * sv[1], p);
            if (val > bestVal) bestVal = val;
        } while (advance());
        return bestVal;
    }
    if (n == 3) {
        Eigen::Matrix3cd head3 = head, scaled, M;
        std::vector<Eigen::Matrix3cd> K3(K.begin(), K.end());
        do {
            M = head3;
            for (int g = 0; g < interior; ++g) {
                scaled = K3[g];
                scaled.row(1) *= phase[idx[2 * g]];
                scaled.row(2) *= phase[idx[2 * g + 1]];
                M = M * scaled;
            }
            auto l = herm_eigenvalues_3x3(M.adjoint() * M);
            double val = half_pow(l[0], p) + half_pow(l[1], p) + half_pow(l[2], p);
            if (val > bestVal) bestVal = val;
        } while (advance());
        return bestVal;
    }

    ComplexMatrix scaled(n, n), M(n, n);
    do {
        M = head;
        for (int g = 0; g < interior; ++g) {
            // phase 1 on row 0, gridded phases on rows 1..n-1
            scaled = K[g];
            for (int row = 1; row < n; ++row)
                scaled.row(row) *= phase[idx[g * (n - 1) + (row - 1)]];
            M = M * scaled;
        }
        double val = sum_sv_pow(singular_values(M), p);
        if (val > bestVal) bestVal = val;
    } while (advance());
    return bestVal;
}

std::vector<SweepPoint> sweep_p(const ChainInstance& inst, const std::vector<double>& pGrid,
                                const OptimizerConfig& cfg) {
    for (size_t i = 0; i + 1 < pGrid.size(); ++i)
        if (!(pGrid[i] < pGrid[i + 1]))
            throw DomainError("sweep_p: p grid must be strictly ascending");

    std::vector<SweepPoint> out;
    for (size_t i = 0; i < pGrid.size(); ++i) {
        OptimizerConfig c = cfg;
        c.seed = cfg.seed + 7919 * i;
        out.push_back({pGrid[i], maximize_over_swivels(inst, pGrid[i], c)});
    }
    // Cross-seeding: every p's best swivels re-evaluated at every other p.
    for (size_t i = 0; i < pGrid.size(); ++i) {
        for (size_t j = 0; j < pGrid.size(); ++j) {
            if (i == j) continue;
            double v = chain_norm(inst, out[j].result.bestSwivels, pGrid[i]);
            if (v > out[i].result.value) {
                out[i].result.value = v;
                out[i].result.bestSwivels = out[j].result.bestSwivels;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tripartite marginal chain.
// ---------------------------------------------------------------------------

namespace {

struct MarginalParts {
    ComplexMatrix left;      // embedded rhoAC^{1/p}
    ComplexMatrix right;     // embedded rhoC^{-1/p} * embedded rhoBC^{1/p}
    PsdOperator rhoC;
    TensorShape shape;
    double p;
};

MarginalParts marginal_parts(const TripartiteInstance& inst, double p) {
    if (!(p >= 1.0)) throw InvalidExponent("marginal chain: p must be >= 1");
    if (inst.shape.factorDims.size() != 3)
        throw ShapeMismatch("marginal chain: tensor shape must have three factors");
    if (inst.shape.dim() != inst.rho.dim())
        throw ShapeMismatch("marginal chain: shape does not match operator dimension");

    const ComplexMatrix& rho = inst.rho.matrix();
    PsdOperator rhoAC = spectral_decompose(partial_trace(rho, inst.shape, {1}));
    PsdOperator rhoBC = spectral_decompose(partial_trace(rho, inst.shape, {0}));
    PsdOperator rhoC = spectral_decompose(partial_trace(rho, inst.shape, {0, 1}));

    MarginalParts parts{
        embed_on_factors(real_power(rhoAC, 1.0 / p), inst.shape, {0, 2}),
        embed_on_factors(real_power(rhoC, -1.0 / p), inst.shape, {2}) *
            embed_on_factors(real_power(rhoBC, 1.0 / p), inst.shape, {1, 2}),
        std::move(rhoC), inst.shape, p};
    return parts;
}

double marginal_eval(const MarginalParts& parts, const ComplexMatrix& V_C) {
    ComplexMatrix M = parts.left * embed_on_factors(V_C, parts.shape, {2}) * parts.right;
    return sum_sv_pow(singular_values(M), parts.p);
}

}  // namespace

double marginal_chain_value(const TripartiteInstance& inst, const ComplexMatrix& V_C,
                            double p) {
    MarginalParts parts = marginal_parts(inst, p);
    const int c = parts.rhoC.dim();
    if (V_C.rows() != c || V_C.cols() != c)
        throw ShapeMismatch("marginal_chain_value: swivel must act on the shared factor");
    if (max_abs(V_C.adjoint() * V_C - ComplexMatrix::Identity(c, c)) >
        tolerances().unitarityTol)
        throw CommutationViolation("marginal_chain_value: swivel is not unitary");
    if (verify_commutation(V_C, parts.rhoC) > tolerances().commutationRel)
        throw CommutationViolation(
            "marginal_chain_value: swivel does not commute with rho_C");
    return marginal_eval(parts, V_C);
}

OptResult marginal_chain_maximize(const TripartiteInstance& inst, double p,
                                  const OptimizerConfig& cfg) {
    MarginalParts parts = marginal_parts(inst, p);
    std::vector<CommutantStructure> structs{commutant_structure(parts.rhoC)};
    AscentProblem prob{&structs, [&](const std::vector<ComplexMatrix>& V) {
                           return marginal_eval(parts, V[0]);
                       }};
    return run_multistart(prob, cfg);
}

double marginal_phase_grid(const TripartiteInstance& inst, double p, int gridPoints) {
    if (gridPoints < 1) throw DomainError("marginal_phase_grid: gridPoints must be >= 1");
    MarginalParts parts = marginal_parts(inst, p);
    CommutantStructure S = commutant_structure(parts.rhoC);
    if (!S.allScalarBlocks())
        throw NonScalarCommutant("marginal_phase_grid: rho_C has a degenerate cluster");

    const int c = parts.rhoC.dim();
    const int freePhases = c - 1;  // one global phase drops out of the norm
    double evalsNeeded = std::pow(static_cast<double>(gridPoints), freePhases);
    if (evalsNeeded > static_cast<double>(tolerances().gridBudget))
        throw GridTooLarge("marginal_phase_grid: grid exceeds the budget");

    // M(phi) = sum_k e^{i phi_k} W_k with W_k = left * embed(P_k) * right.
    std::vector<ComplexMatrix> W;
    for (int k = 0; k < c; ++k) {
        ComplexMatrix proj = S.blockBases[k].col(0) * S.blockBases[k].col(0).adjoint();
        W.push_back(parts.left * embed_on_factors(proj, parts.shape, {2}) * parts.right);
    }
    if (freePhases == 0) return sum_sv_pow(singular_values(W[0]), p);

    const int n = inst.rho.dim();
    std::vector<int> idx(freePhases, 0);
    double bestVal = -kInfinity;
    ComplexMatrix M(n, n);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
    bool more = true;
    while (more) {
        M = W[0];
        for (int k = 1; k < c; ++k)
            M.noalias() += std::polar(1.0, 2.0 * M_PI * idx[k - 1] / gridPoints) * W[k];
        es.compute(M.adjoint() * M, Eigen::EigenvaluesOnly);
        double val = 0.0;
        for (int i = 0; i < n; ++i) val += half_pow(std::max(0.0, es.eigenvalues()(i)), p);
        if (val > bestVal) bestVal = val;

        more = false;
        for (int d = freePhases - 1; d >= 0; --d) {
            if (++idx[d] < gridPoints) {
                more = true;
                break;
            }
            idx[d] = 0;
        }
    }
    return bestVal;
}

}  // namespace swivel
