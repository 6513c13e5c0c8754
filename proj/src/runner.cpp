#include "swivel/runner.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace swivel {

using nlohmann::json;

std::vector<double> default_p_grid(bool tripartite) {
    if (tripartite) return {2.0, 3.0, 4.0, 6.0};
    return {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0};
}

namespace {

// Monotonicity run on a swivel chain: optimizer sweep, optional exhaustive
// phase-grid oracle. The hard verdict comes from the oracle when present;
// optimizer-only violations stay inconclusive (the computed maxima are only
// lower bounds).
VerificationReport verify_monotone_chain(const ChainInstance& inst,
                                         const InequalityParams& prm) {
    VerificationReport rep;
    rep.inequality = "monotone";
    rep.tolerance = prm.tol;
    std::vector<double> grid = prm.pGrid.empty() ? default_p_grid(false) : prm.pGrid;

    auto sweep = sweep_p(inst, grid, prm.opt);
    for (const auto& pt : sweep) rep.curve.emplace_back(pt.p, pt.result.value);

    if (prm.withOracle) {
        for (double p : grid)
            rep.oracleCurve.push_back(brute_force_phase_grid(inst, p, prm.gridPoints));
    }

    const std::vector<double>* values = nullptr;
    std::vector<double> optValues;
    for (const auto& [p, v] : rep.curve) optValues.push_back(v);
    values = prm.withOracle ? &rep.oracleCurve : &optValues;

    double worst = kInfinity;
    size_t worstIdx = 0;
    for (size_t i = 0; i + 1 < values->size(); ++i) {
        double step = (*values)[i] - (*values)[i + 1];
        if (step < worst) {
            worst = step;
            worstIdx = i;
        }
    }
    if (values->size() < 2) {
        worst = 0.0;
        worstIdx = 0;
        rep.lhs = rep.rhs = values->empty() ? 0.0 : values->front();
    } else {
        rep.rhs = (*values)[worstIdx];
        rep.lhs = (*values)[worstIdx + 1];
    }
    rep.slack = worst;

    double allow = prm.tol * std::max(1.0, std::abs(rep.rhs));
    if (worst >= -allow) {
        rep.status = VerifyStatus::HOLDS;
    } else {
        rep.status = prm.withOracle ? VerifyStatus::VIOLATED_BEYOND_TOL
                                    : VerifyStatus::INCONCLUSIVE_OPTIMIZER_GAP;
        if (!prm.withOracle)
            rep.notes.push_back("optimizer-gap or violation: computed maxima are lower "
                                "bounds; rerun with an oracle-backed instance class");
    }
    rep.notes.push_back("swivel search spans the full block-unitary commutant group");
    return rep;
}

VerificationReport verify_monotone_marginal(const TripartiteInstance& inst,
                                            const InequalityParams& prm) {
    VerificationReport rep;
    rep.inequality = "monotone";
    rep.tolerance = prm.tol;
    std::vector<double> grid = prm.pGrid.empty() ? default_p_grid(true) : prm.pGrid;

    bool oracleUsable = prm.withOracle;
    for (double p : grid) {
        OptimizerConfig cfg = prm.opt;
        cfg.seed = prm.opt.seed + static_cast<std::uint64_t>(1000 * p);
        rep.curve.emplace_back(p, marginal_chain_maximize(inst, p, cfg).value);
        if (p < 2.0)
            rep.notes.push_back("p < 2 lies outside the stated monotonicity range for "
                                "the marginal chain");
    }
    if (oracleUsable) {
        try {
            for (double p : grid)
                rep.oracleCurve.push_back(marginal_phase_grid(inst, p, prm.gridPoints));
        } catch (const NonScalarCommutant&) {
            oracleUsable = false;
            rep.oracleCurve.clear();
            rep.notes.push_back("shared-factor marginal has a degenerate cluster; the "
                                "phase oracle does not apply");
        }
    }

    std::vector<double> optValues;
    for (const auto& [p, v] : rep.curve) optValues.push_back(v);
    const std::vector<double>& values = oracleUsable ? rep.oracleCurve : optValues;

    double worst = kInfinity;
    size_t worstIdx = 0;
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        double step = values[i] - values[i + 1];
        if (step < worst) {
            worst = step;
            worstIdx = i;
        }
    }
    if (values.size() < 2) {
        worst = 0.0;
        rep.lhs = rep.rhs = values.empty() ? 0.0 : values.front();
    } else {
        rep.rhs = values[worstIdx];
        rep.lhs = values[worstIdx + 1];
    }
    rep.slack = worst;

    double allow = prm.tol * std::max(1.0, std::abs(rep.rhs));
    if (worst >= -allow) {
        rep.status = VerifyStatus::HOLDS;
    } else {
        rep.status = oracleUsable ? VerifyStatus::VIOLATED_BEYOND_TOL
                                  : VerifyStatus::INCONCLUSIVE_OPTIMIZER_GAP;
    }
    return rep;
}

}  // namespace

VerificationReport verify_instance(const GeneratedInstance& inst,
                                   const InequalityParams& prm) {
    if (prm.inequality == "hirschman") {
        if (!std::holds_alternative<ChainInstance>(inst))
            throw InvalidSpec("hirschman verification needs a chain instance");
        return verify_hirschman(std::get<ChainInstance>(inst), prm.p, prm.q, prm.quad,
                                prm.tol);
    }
    if (prm.inequality == "gt") {
        if (!std::holds_alternative<ChainInstance>(inst))
            throw InvalidSpec("gt verification needs a chain instance");
        return verify_gt(std::get<ChainInstance>(inst), prm.q, prm.quad, prm.tol);
    }
    if (prm.inequality == "monotone") {
        if (std::holds_alternative<ChainInstance>(inst))
            return verify_monotone_chain(std::get<ChainInstance>(inst), prm);
        return verify_monotone_marginal(std::get<TripartiteInstance>(inst), prm);
    }
    throw InvalidSpec("unknown inequality: " + prm.inequality);
}

namespace {

json params_to_json(const InequalityParams& prm) {
    json doc{{"inequality", prm.inequality},
                {"p", prm.p},
                {"q", prm.q},
                {"pGrid", prm.pGrid},
                {"tol", prm.tol},
                {"quadrature",
                 {{"halfWidth", prm.quad.halfWidth},
                  {"panels", prm.quad.panels},
                  {"nodesPerPanel", prm.quad.nodesPerPanel},
                  {"tailEps", prm.quad.tailEps}}},
                {"optimizer",
                 {{"restarts", prm.opt.restarts},
                  {"maxIters", prm.opt.maxIters},
                  {"stepInit", prm.opt.stepInit},
                  {"convTolRel", prm.opt.convTolRel},
                  {"fdStep", prm.opt.fdStep},
                  {"seed", prm.opt.seed}}},
                {"withOracle", prm.withOracle},
                {"gridPoints", prm.gridPoints}};
    // density provenance: the interpolation weight is beta_{q/p}; the
    // trace-exponential corollary uses the theta -> 0 limit
    if (prm.inequality == "hirschman")
        doc["theta"] = DensityParams::from_pq(prm.p, prm.q).theta;
    else if (prm.inequality == "gt")
        doc["theta"] = 0.0;
    return doc;
}

InequalityParams params_from_json(const json& j) {
    InequalityParams prm;
    prm.inequality = j.at("inequality").get<std::string>();
    prm.p = j.at("p").get<double>();
    prm.q = j.at("q").get<double>();
    prm.pGrid = j.at("pGrid").get<std::vector<double>>();
    prm.tol = j.at("tol").get<double>();
    const json& q = j.at("quadrature");
    prm.quad = {q.at("halfWidth").get<double>(), q.at("panels").get<int>(),
                q.at("nodesPerPanel").get<int>(), q.at("tailEps").get<double>()};
    const json& o = j.at("optimizer");
    prm.opt.restarts = o.at("restarts").get<int>();
    prm.opt.maxIters = o.at("maxIters").get<int>();
    prm.opt.stepInit = o.at("stepInit").get<double>();
    prm.opt.convTolRel = o.at("convTolRel").get<double>();
    prm.opt.fdStep = o.at("fdStep").get<double>();
    prm.opt.seed = o.at("seed").get<std::uint64_t>();
    prm.withOracle = j.at("withOracle").get<bool>();
    prm.gridPoints = j.at("gridPoints").get<int>();
    return prm;
}

}  // namespace

json report_to_json(const VerificationReport& rep, const GenSpec& spec,
                    const InequalityParams& prm) {
    json doc;
    doc["schemaVersion"] = kSchemaVersion;
    doc["fileType"] = "report";
    doc["toolVersion"] = toolVersion();
    doc["precision"] = "ieee-754 binary64";
    doc["inequality"] = rep.inequality;
    doc["parameters"] = params_to_json(prm);
    doc["instanceSpec"] = genspec_to_json(spec);
    doc["seed"] = spec.seed;
    doc["lhs"] = std::isfinite(rep.lhs) ? json(hex_double(rep.lhs)) : json("-inf");
    doc["rhs"] = hex_double(rep.rhs);
    doc["slack"] = std::isfinite(rep.slack) ? json(hex_double(rep.slack)) : json("inf");
    doc["lhsDecimal"] = rep.lhs;
    doc["rhsDecimal"] = rep.rhs;
    doc["slackDecimal"] = rep.slack;
    doc["status"] = to_string(rep.status);
    json diag;
    diag["quadrature"] = {{"errorEstimate", rep.quadrature.errorEstimate},
                          {"tailBound", rep.quadrature.tailBound},
                          {"halfWidth", rep.quadrature.halfWidth},
                          {"panels", rep.quadrature.panels},
                          {"nodesPerPanel", rep.quadrature.nodesPerPanel},
                          {"clampCount", rep.quadrature.clampCount}};
    if (!rep.curve.empty()) {
        json curve = json::array();
        for (const auto& [p, v] : rep.curve)
            curve.push_back({{"p", p}, {"value", hex_double(v)}, {"valueDecimal", v}});
        diag["curve"] = std::move(curve);
    }
    if (!rep.oracleCurve.empty()) diag["oracleCurve"] = rep.oracleCurve;
    diag["notes"] = rep.notes;
    doc["diagnostics"] = std::move(diag);
    return doc;
}

std::pair<double, double> rerun_report(const json& reportDoc) {
    GenSpec spec = genspec_from_json(reportDoc.at("instanceSpec"));
    InequalityParams prm = params_from_json(reportDoc.at("parameters"));
    GeneratedInstance inst = generate(spec);
    VerificationReport rep = verify_instance(inst, prm);
    return {rep.lhs, rep.rhs};
}

int exit_code_for(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::HOLDS: return 0;
        case VerifyStatus::VIOLATED_BEYOND_TOL: return 2;
        default: return 3;
    }
}

}  // namespace swivel
