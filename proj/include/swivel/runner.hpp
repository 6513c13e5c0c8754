#pragma once

// Composes generation, optimization, and verification into the report
// pipeline shared by the CLI and the acceptance suite. Reports embed the
// generator spec, seeds, and resolved configuration so any report can be
// re-run to bit-identical left/right sides.

#include <nlohmann/json_fwd.hpp>

#include "swivel/instgen.hpp"
#include "swivel/interp.hpp"

namespace swivel {

struct InequalityParams {
    std::string inequality = "hirschman";  // hirschman | gt | monotone
    double p = 4.0;
    double q = 2.0;
    std::vector<double> pGrid;             // monotone runs; empty = default
    double tol = tolerances().holdsTol;
    QuadratureConfig quad{};
    OptimizerConfig opt{};
    bool withOracle = false;
    int gridPoints = 720;
};

// Default p grids: chains get the full exponent ladder, the tripartite
// marginal chain starts at its stated range p >= 2.
std::vector<double> default_p_grid(bool tripartite);

VerificationReport verify_instance(const GeneratedInstance& inst,
                                   const InequalityParams& prm);

nlohmann::json report_to_json(const VerificationReport& rep, const GenSpec& spec,
                              const InequalityParams& prm);

// Regenerates the instance from the report's embedded spec and re-verifies
// with the embedded parameters; returns the recomputed (lhs, rhs).
std::pair<double, double> rerun_report(const nlohmann::json& reportDoc);

int exit_code_for(VerifyStatus s);

}  // namespace swivel
