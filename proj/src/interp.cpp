#include "swivel/interp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace swivel {

double beta_density(double theta, double t) {
    if (!(theta > 0.0 && theta < 1.0))
        throw DomainError("beta_density: theta must lie in (0,1); theta=0 is beta_zero_density");
    return std::sin(M_PI * theta) /
           (2.0 * theta * (std::cosh(M_PI * t) + std::cos(M_PI * theta)));
}

double alpha_density(double theta, double t) {
    if (!(theta > 0.0 && theta < 1.0))
        throw DomainError("alpha_density: theta must lie in (0,1)");
    return std::sin(M_PI * theta) /
           (2.0 * (1.0 - theta) * (std::cosh(M_PI * t) - std::cos(M_PI * theta)));
}

double beta_zero_density(double t) {
    return M_PI / (2.0 * (std::cosh(M_PI * t) + 1.0));
}

// One-sided tails from the antiderivative
//   int dt / (cosh(pi t) + cos(pi a)) = 2/(pi sin(pi a)) atan(tan(pi a/2) tanh(pi t/2)).
double beta_tail_mass(double theta, double T) {
    if (theta == 0.0) return beta_zero_tail_mass(T);
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("beta_tail_mass: bad theta");
    return 0.5 - std::atan(std::tan(M_PI * theta / 2.0) * std::tanh(M_PI * T / 2.0)) /
                     (M_PI * theta);
}

double alpha_tail_mass(double theta, double T) {
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("alpha_tail_mass: bad theta");
    double om = 1.0 - theta;
    return 0.5 -
           std::atan(std::tan(M_PI * om / 2.0) * std::tanh(M_PI * T / 2.0)) / (M_PI * om);
}

double beta_zero_tail_mass(double T) {
    return 0.5 * (1.0 - std::tanh(M_PI * T / 2.0));
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> nodes, weights;
};

GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

const GaussRule& cached_rule(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;
}

// Panel edges on [0, T], graded so panels are finer where the densities
// vary fastest.
std::vector<std::pair<double, double>> panel_edges(double T, int panels) {
    double split = std::min(1.5, 0.5 * T);
    int inner = std::max(2, panels / 2);
    int outer = std::max(2, panels - inner);
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < inner; ++i)
        out.emplace_back(split * i / inner, split * (i + 1) / inner);
    for (int i = 0; i < outer; ++i)
        out.emplace_back(split + (T - split) * i / outer,
                         split + (T - split) * (i + 1) / outer);
    return out;
}

int auto_panels(double T) { return std::max(8, static_cast<int>(std::ceil(2.0 * T))); }

// integral over [-T, T] of f, mirrored onto [0, T] panels; fixed node order.
template <typename F>
double composite_integral(const F& f, const std::vector<std::pair<double, double>>& panels,
                          int nodesPerPanel) {
    const GaussRule& rule = cached_rule(nodesPerPanel);
    double acc = 0.0;
    for (const auto& [a, b] : panels) {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double panelAcc = 0.0;
        for (int i = 0; i < nodesPerPanel; ++i) {
            double t = mid + half * rule.nodes[i];
            panelAcc += rule.weights[i] * (f(t) + f(-t));
        }
        acc += half * panelAcc;
    }
    return acc;
}

}  // namespace

double integrate_density(DensityKind kind, double theta, double halfWidth, int panels,
                         int nodesPerPanel) {
    if (panels <= 0) panels = auto_panels(halfWidth);
    auto edges = panel_edges(halfWidth, panels);
    auto f = [&](double t) {
        switch (kind) {
            case DensityKind::Alpha: return alpha_density(theta, t);
            case DensityKind::Beta: return beta_density(theta, t);
            default: return beta_zero_density(t);
        }
    };
    return composite_integral(f, edges, nodesPerPanel);
}

namespace {

// Per-node chain product of complex powers; caches the spectral data.
struct ComplexPowerChain {
    struct Op {
        ComplexMatrix U;
        RealVector root;    // lambda^{1/q} on support, 0 elsewhere
        RealVector logLam;  // ln lambda on support
        std::vector<bool> onSupport;
    };
    std::vector<Op> ops;
    double q;
    int n;

    ComplexPowerChain(const ChainInstance& inst, double qExp) : q(qExp), n(inst.dim()) {
        if (!(qExp >= 1.0)) throw InvalidExponent("complex power chain: q must be >= 1");
        inst.validate();
        for (const auto& C : inst.operators) {
            Op op;
            op.U = C.eigenvectors();
            op.root = RealVector::Zero(n);
            op.logLam = RealVector::Zero(n);
            op.onSupport.assign(n, false);
            for (int j = 0; j < n; ++j) {
                double l = C.eigenvalues()(j);
                if (l > C.supportCutoff()) {
                    op.root(j) = std::pow(l, 1.0 / qExp);
                    op.logLam(j) = std::log(l);
                    op.onSupport[j] = true;
                }
            }
            ops.push_back(std::move(op));
        }
    }

    // || prod_i C_i^{(1+it)/q} ||_q^q
    double norm_q_pow(double t) const {
        ComplexMatrix M;
        Eigen::VectorXcd d(n);
        for (size_t i = 0; i < ops.size(); ++i) {
            const Op& op = ops[i];
            for (int j = 0; j < n; ++j)
                d(j) = op.onSupport[j]
                           ? op.root(j) * std::polar(1.0, t / q * op.logLam(j))
                           : Complex(0.0);
            ComplexMatrix W = op.U * d.asDiagonal() * op.U.adjoint();
            M = (i == 0) ? W : ComplexMatrix(M * W);
        }
        RealVector s = singular_values(M);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += std::pow(s(j), q);
        return acc;
    }
};

// Bound on |log ||prod C_i^{(1+it)/q}||_q^q| from per-operator extreme
// singular values on the support; the kernel-side bound falls back to the
// underflow floor when an operator is rank deficient.
double integrand_log_bound(const ChainInstance& inst) {
    double logUpper = 0.0;
    double logLower = 0.0;
    bool deficient = false;
    for (int i = 0; i < inst.length(); ++i) {
        const auto& C = inst.operators[i];
        double lmax = 0.0, lmin = kInfinity, trSupp = 0.0;
        for (int j = 0; j < C.dim(); ++j) {
            double l = C.eigenvalues()(j);
            if (l > C.supportCutoff()) {
                lmax = std::max(lmax, l);
                lmin = std::min(lmin, l);
                trSupp += l;
            } else {
                deficient = true;
            }
        }
        if (trSupp == 0.0) deficient = true;
        logUpper += (i == 0) ? std::log(std::max(trSupp, tolerances().integrandFloor))
                             : std::log(std::max(lmax, tolerances().integrandFloor));
        if (std::isfinite(lmin) && lmin > 0.0) logLower += std::log(lmin);
    }
    if (deficient) logLower = std::log(tolerances().integrandFloor);
    return std::max(std::abs(logUpper), std::abs(logLower));
}

double choose_half_width(double theta, double B, double tailEps) {
    auto ok = [&](double T) { return B * 2.0 * beta_tail_mass(theta, T) <= tailEps; };
    double T = 2.0;
    while (!ok(T) && T < 512.0) T *= 2.0;
    double lo = T / 2.0, hi = T;
    if (T <= 2.0) return 2.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

QuadratureResult weighted_log_norm_integral(const ChainInstance& inst, double theta,
                                            double q, const QuadratureConfig& quad) {
    ComplexPowerChain chain(inst, q);
    double B = integrand_log_bound(inst);

    QuadratureResult out;
    out.halfWidth = (quad.halfWidth > 0.0) ? quad.halfWidth
                                           : choose_half_width(theta, B, quad.tailEps);
    out.panels = (quad.panels > 0) ? quad.panels : auto_panels(out.halfWidth);
    out.nodesPerPanel = quad.nodesPerPanel;
    out.tailBound = B * 2.0 * beta_tail_mass(theta, out.halfWidth);

    long clampCount = 0;
    auto weight = [&](double t) {
        return (theta == 0.0) ? beta_zero_density(t) : beta_density(theta, t);
    };
    auto f = [&](double t) {
        double nq = chain.norm_q_pow(t);
        if (nq < tolerances().integrandFloor) {
            ++clampCount;
            nq = tolerances().integrandFloor;
        }
        return weight(t) * std::log(nq);
    };

    auto edges = panel_edges(out.halfWidth, out.panels);
    double full = composite_integral(f, edges, out.nodesPerPanel);
    double half = composite_integral(f, edges, std::max(2, out.nodesPerPanel / 2));
    out.value = full;
    out.errorEstimate = std::abs(full - half) + out.tailBound;
    out.clampCount = clampCount;
    if (clampCount > 0)
        throw IntegrandUnderflow(
            "quadrature: q-norm fell below the positive floor at " +
                std::to_string(clampCount) + " node(s)",
            clampCount);
    return out;
}

}  // namespace

double hirschman_lhs(const ChainInstance& inst, double p) {
    double v = chain_norm(inst, identity_swivels(inst), p);
    return (v > 0.0) ? std::log(v) : -kInfinity;
}

QuadratureResult hirschman_rhs(const ChainInstance& inst, double p, double q,
                               const QuadratureConfig& quad) {
    if (!(q >= 1.0 && q < p))
        throw InvalidExponent("hirschman_rhs: need 1 <= q < p");
    return weighted_log_norm_integral(inst, q / p, q, quad);
}

const char* to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::HOLDS: return "HOLDS";
        case VerifyStatus::VIOLATED_BEYOND_TOL: return "VIOLATED_BEYOND_TOL";
        default: return "INCONCLUSIVE_OPTIMIZER_GAP";
    }
}

namespace {

VerificationReport finalize_report(VerificationReport rep, double tol) {
    rep.slack = rep.rhs - rep.lhs;
    rep.tolerance = tol;
    rep.status = (rep.slack >= -(tol + rep.quadrature.errorEstimate))
                     ? VerifyStatus::HOLDS
                     : VerifyStatus::VIOLATED_BEYOND_TOL;
    return rep;
}

}  // namespace

VerificationReport verify_hirschman(const ChainInstance& inst, double p, double q,
                                    const QuadratureConfig& quad, double tol) {
    VerificationReport rep;
    rep.inequality = "hirschman";
    rep.lhs = hirschman_lhs(inst, p);
    try {
        rep.quadrature = hirschman_rhs(inst, p, q, quad);
        rep.rhs = rep.quadrature.value;
    } catch (const IntegrandUnderflow& e) {
        rep.status = VerifyStatus::INCONCLUSIVE_OPTIMIZER_GAP;
        rep.quadrature.clampCount = e.underflowCount;
        rep.tolerance = tol;
        rep.notes.push_back(e.what());
        return rep;
    }
    return finalize_report(std::move(rep), tol);
}

double gt_lhs(const ChainInstance& inst) {
    inst.validate();
    const int n = inst.dim();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& C : inst.operators) {
        LogResult lr = log_on_support(C);
        if (lr.rankDeficient)
            throw RankDeficient("gt_lhs: operator is not positive definite");
        sum += lr.value;
    }
    return std::log(matrix_exp(sum).trace().real());
}

VerificationReport verify_gt(const ChainInstance& inst, double q,
                             const QuadratureConfig& quad, double tol) {
    if (!(q >= 1.0)) throw InvalidExponent("verify_gt: q must be >= 1");
    VerificationReport rep;
    rep.inequality = "gt";
    rep.lhs = gt_lhs(inst);
    try {
        rep.quadrature = weighted_log_norm_integral(inst, 0.0, q, quad);
        rep.rhs = rep.quadrature.value;
    } catch (const IntegrandUnderflow& e) {
        rep.status = VerifyStatus::INCONCLUSIVE_OPTIMIZER_GAP;
        rep.quadrature.clampCount = e.underflowCount;
        rep.tolerance = tol;
        rep.notes.push_back(e.what());
        return rep;
    }
    return finalize_report(std::move(rep), tol);
}

double lie_trotter_value(const ChainInstance& inst, double p) {
    if (!(p >= 1.0)) throw InvalidExponent("lie_trotter_value: p must be >= 1");
    inst.validate();
    ComplexMatrix S = real_power(inst.operators[0], 1.0 / p);
    for (int i = 1; i < inst.length(); ++i) {
        ComplexMatrix half = real_power(inst.operators[i], 0.5 / p);
        S = half * S * half;
    }
    PsdOperator sym = spectral_decompose(0.5 * (S + S.adjoint()));
    double acc = 0.0;
    for (int j = 0; j < sym.dim(); ++j) {
        double l = sym.eigenvalues()(j);
        if (l > sym.supportCutoff()) acc += std::exp(p * std::log(l));
    }
    return acc;
}

std::vector<TrotterPoint> lie_trotter_convergence(const ChainInstance& inst,
                                                  const std::vector<double>& pList) {
    double target = std::exp(gt_lhs(inst));
    std::vector<TrotterPoint> out;
    for (double p : pList) {
        double v = lie_trotter_value(inst, p);
        out.push_back({p, v, std::abs(v - target)});
    }
    return out;
}

}  // namespace swivel
