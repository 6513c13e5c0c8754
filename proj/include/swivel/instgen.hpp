#pragma once

// Seeded instance generation and the text serialization schema for
// instances, swivel assignments, and reports. Number fields are hex-float
// strings (authoritative, bit-exact) with non-authoritative decimal shadows.

#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "swivel/swivelopt.hpp"

namespace swivel {

inline constexpr int kSchemaVersion = 1;

enum class GenKind { Psd, Pd, Density, RankDeficient, CommutingFamily, TripartiteDensity };

const char* to_string(GenKind k);
GenKind gen_kind_from_string(const std::string& s);

struct GenSpec {
    GenKind kind = GenKind::Psd;
    int dim = 2;                   // square operators (chain kinds)
    std::vector<int> factorDims;   // tripartite kind
    int L = 1;
    int rank = 1;                  // rankDeficient kind
    std::uint64_t seed = 0;
    double conditionCap = 1e4;     // max lambda_max/lambda_min for pd

    void validate() const;
    std::string label() const;
};

using GeneratedInstance = std::variant<ChainInstance, TripartiteInstance>;

struct InstanceFile {
    GenSpec spec;
    GeneratedInstance instance;
};

// Deterministic per seed; psd = G G^* with complex Gaussian G, pd adds the
// smallest shift meeting the condition cap, density normalizes the trace,
// commutingFamily shares one random eigenbasis, tripartiteDensity is a
// density on the factor product.
GeneratedInstance generate(const GenSpec& spec);

// Bit-exact hex-float encoding helpers.
std::string hex_double(double x);
double parse_hex_double(const std::string& s);

std::string instance_to_string(const InstanceFile& file);
InstanceFile instance_from_string(const std::string& text);

void save_instance(const std::string& path, const InstanceFile& file);
InstanceFile load_instance(const std::string& path);

void save_swivels(const std::string& path, const SwivelAssignment& swivels);
SwivelAssignment load_swivels(const std::string& path);

// Whole-file atomic JSON I/O (write temp, rename).
void save_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json load_json(const std::string& path);

nlohmann::json genspec_to_json(const GenSpec& spec);
GenSpec genspec_from_json(const nlohmann::json& j);

// Plot-ready CSV for sweep curves: columns p,value,oracleValue,restartSpread.
struct SweepCsvRow {
    double p = 0.0;
    double value = 0.0;
    std::optional<double> oracleValue;
    double restartSpread = 0.0;
};
void write_sweep_csv(const std::string& path, const std::vector<SweepCsvRow>& rows,
                     const std::string& configLine);

}  // namespace swivel
