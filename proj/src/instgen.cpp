#include "swivel/instgen.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swivel/rng.hpp"

namespace swivel {

using nlohmann::json;

const char* to_string(GenKind k) {
    switch (k) {
        case GenKind::Psd: return "psd";
        case GenKind::Pd: return "pd";
        case GenKind::Density: return "density";
        case GenKind::RankDeficient: return "rankDeficient";
        case GenKind::CommutingFamily: return "commutingFamily";
        default: return "tripartiteDensity";
    }
}

GenKind gen_kind_from_string(const std::string& s) {
    if (s == "psd") return GenKind::Psd;
    if (s == "pd") return GenKind::Pd;
    if (s == "density") return GenKind::Density;
    if (s == "rankDeficient") return GenKind::RankDeficient;
    if (s == "commutingFamily") return GenKind::CommutingFamily;
    if (s == "tripartiteDensity") return GenKind::TripartiteDensity;
    throw InvalidSpec("unknown generator kind: " + s);
}

void GenSpec::validate() const {
    if (kind == GenKind::TripartiteDensity) {
        if (factorDims.size() != 3)
            throw InvalidSpec("tripartiteDensity requires exactly three factor dims");
        for (int d : factorDims)
            if (d < 1) throw InvalidSpec("factor dims must be positive");
    } else {
        if (dim < 1) throw InvalidSpec("dim must be positive");
        if (L < 1) throw InvalidSpec("L must be >= 1");
        if (kind == GenKind::RankDeficient && (rank < 1 || rank > dim))
            throw InvalidSpec("rank must lie in [1, dim]");
        if (kind == GenKind::Pd && !(conditionCap > 1.0))
            throw InvalidSpec("conditionCap must exceed 1");
    }
}

std::string GenSpec::label() const {
    std::ostringstream os;
    os << to_string(kind) << "-";
    if (kind == GenKind::TripartiteDensity) {
        for (size_t i = 0; i < factorDims.size(); ++i)
            os << (i ? "x" : "") << factorDims[i];
    } else {
        os << "n" << dim << "-L" << L;
    }
    os << "-seed" << seed;
    return os.str();
}

namespace {

ComplexMatrix gaussian_matrix(int rows, int cols, GaussianStream& g) {
    ComplexMatrix G(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) G(i, j) = g.complexGaussian();
    return G;
}

PsdOperator wishart(int n, int rank, GaussianStream& g) {
    ComplexMatrix G = gaussian_matrix(n, rank, g);
    return spectral_decompose(G * G.adjoint());
}

PsdOperator shift_to_condition(const PsdOperator& C, double cap) {
    double lmax = C.lambdaMax();
    double lmin = C.eigenvalues()(C.dim() - 1);
    double shift = std::max(0.0, (lmax - cap * lmin) / (cap - 1.0));
    if (shift == 0.0) return C;
    RealVector ev = C.eigenvalues().array() + shift;
    double cutoff = tolerances().supportCutoffRel * ev(0);
    return PsdOperator(ev, C.eigenvectors(), cutoff);
}

PsdOperator normalize_trace(const PsdOperator& C) {
    double tr = C.trace();
    if (tr <= 0.0) throw InvalidSpec("cannot normalize a zero-trace operator");
    RealVector ev = C.eigenvalues() / tr;
    double cutoff = tolerances().supportCutoffRel * ev(0);
    return PsdOperator(ev, C.eigenvectors(), cutoff);
}

}  // namespace

GeneratedInstance generate(const GenSpec& spec) {
    spec.validate();
    GaussianStream g(spec.seed);

    if (spec.kind == GenKind::TripartiteDensity) {
        TensorShape shape{spec.factorDims};
        PsdOperator rho = normalize_trace(wishart(shape.dim(), shape.dim(), g));
        return TripartiteInstance{std::move(rho), shape, spec.label(), spec.seed};
    }

    ChainInstance inst;
    inst.label = spec.label();
    inst.seed = spec.seed;

    if (spec.kind == GenKind::CommutingFamily) {
        ComplexMatrix U = haar_unitary(spec.dim, g);
        for (int i = 0; i < spec.L; ++i) {
            std::vector<std::pair<double, int>> draws(spec.dim);
            for (int j = 0; j < spec.dim; ++j) draws[j] = {g.uniform(0.25, 2.5), j};
            std::sort(draws.begin(), draws.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
            RealVector ev(spec.dim);
            ComplexMatrix V(spec.dim, spec.dim);
            for (int j = 0; j < spec.dim; ++j) {
                ev(j) = draws[j].first;
                V.col(j) = U.col(draws[j].second);
            }
            inst.operators.emplace_back(ev, V, tolerances().supportCutoffRel * ev(0));
        }
        return inst;
    }

    for (int i = 0; i < spec.L; ++i) {
        switch (spec.kind) {
            case GenKind::Psd:
                inst.operators.push_back(wishart(spec.dim, spec.dim, g));
                break;
            case GenKind::Pd:
                inst.operators.push_back(
                    shift_to_condition(wishart(spec.dim, spec.dim, g), spec.conditionCap));
                break;
            case GenKind::Density:
                inst.operators.push_back(normalize_trace(wishart(spec.dim, spec.dim, g)));
                break;
            case GenKind::RankDeficient:
                inst.operators.push_back(wishart(spec.dim, spec.rank, g));
                break;
            default:
                throw InvalidSpec("unhandled generator kind");
        }
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

std::string hex_double(double x) {
    if (!std::isfinite(x)) throw Error("hex_double: non-finite value");
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

double parse_hex_double(const std::string& s) {
    if (s.empty()) throw ParseError("empty numeric field");
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size())
        throw ParseError("malformed numeric field: '" + s + "'");
    if (!std::isfinite(v)) throw ParseError("non-finite numeric field: '" + s + "'");
    return v;
}

namespace {

json matrix_to_json(const ComplexMatrix& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j)
            row.push_back({hex_double(M(i, j).real()), hex_double(M(i, j).imag())});
        rows.push_back(std::move(row));
    }
    return rows;
}

json matrix_to_decimal_json(const ComplexMatrix& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j)
            row.push_back({M(i, j).real(), M(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& rows, const std::string& field) {
    if (!rows.is_array() || rows.empty())
        throw ParseError(field + ": expected a non-empty array of rows");
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.at(0).size());
    ComplexMatrix M(r, c);
    for (int i = 0; i < r; ++i) {
        const json& row = rows.at(i);
        if (static_cast<int>(row.size()) != c)
            throw ParseError(field + ": ragged rows at row " + std::to_string(i));
        for (int j = 0; j < c; ++j) {
            const json& e = row.at(j);
            if (!e.is_array() || e.size() != 2)
                throw ParseError(field + ": complex entries must be [re, im]");
            M(i, j) = Complex(parse_hex_double(e.at(0).get<std::string>()),
                              parse_hex_double(e.at(1).get<std::string>()));
        }
    }
    return M;
}

json operator_to_json(const PsdOperator& C) {
    json ev = json::array(), evDec = json::array();
    for (int j = 0; j < C.dim(); ++j) {
        ev.push_back(hex_double(C.eigenvalues()(j)));
        evDec.push_back(C.eigenvalues()(j));
    }
    return json{{"dim", C.dim()},
                {"supportCutoff", hex_double(C.supportCutoff())},
                {"eigenvalues", std::move(ev)},
                {"eigenvaluesDecimal", std::move(evDec)},
                {"eigenvectors", matrix_to_json(C.eigenvectors())},
                {"eigenvectorsDecimal", matrix_to_decimal_json(C.eigenvectors())}};
}

PsdOperator operator_from_json(const json& j) {
    const int n = j.at("dim").get<int>();
    const json& ev = j.at("eigenvalues");
    if (static_cast<int>(ev.size()) != n)
        throw ParseError("operator: eigenvalue count does not match dim");
    RealVector evals(n);
    for (int i = 0; i < n; ++i) evals(i) = parse_hex_double(ev.at(i).get<std::string>());
    ComplexMatrix evecs = matrix_from_json(j.at("eigenvectors"), "eigenvectors");
    if (evecs.rows() != n || evecs.cols() != n)
        throw ParseError("operator: eigenvector matrix must be dim x dim");
    double cutoff = parse_hex_double(j.at("supportCutoff").get<std::string>());
    try {
        return PsdOperator(std::move(evals), std::move(evecs), cutoff);
    } catch (const Error& e) {
        throw ParseError(std::string("operator: violated invariant: ") + e.what());
    }
}

void check_kind_invariants(const InstanceFile& file) {
    if (file.spec.kind == GenKind::Density || file.spec.kind == GenKind::TripartiteDensity) {
        double tr = std::holds_alternative<ChainInstance>(file.instance)
                        ? std::get<ChainInstance>(file.instance).operators.front().trace()
                        : std::get<TripartiteInstance>(file.instance).rho.trace();
        if (std::abs(tr - 1.0) > 1e-12)
            throw ParseError("density operator violates the unit-trace invariant (trace = " +
                             std::to_string(tr) + ")");
    }
}

}  // namespace

std::string instance_to_string(const InstanceFile& file) {
    json doc;
    doc["schemaVersion"] = kSchemaVersion;
    doc["fileType"] = "instance";
    doc["toolVersion"] = toolVersion();
    doc["layout"] =
        "factor 0 slowest; matrices row-major; complex entries [re, im]; "
        "hex-float fields authoritative, *Decimal fields informative";
    doc["spec"] = genspec_to_json(file.spec);
    doc["seed"] = file.spec.seed;

    if (std::holds_alternative<ChainInstance>(file.instance)) {
        const auto& inst = std::get<ChainInstance>(file.instance);
        doc["kind"] = "chain";
        doc["label"] = inst.label;
        json ops = json::array();
        for (const auto& C : inst.operators) ops.push_back(operator_to_json(C));
        doc["operators"] = std::move(ops);
    } else {
        const auto& inst = std::get<TripartiteInstance>(file.instance);
        doc["kind"] = "tripartite";
        doc["label"] = inst.label;
        doc["tensorShape"] = inst.shape.factorDims;
        doc["operators"] = json::array({operator_to_json(inst.rho)});
    }
    return doc.dump(2) + "\n";
}

InstanceFile instance_from_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance: invalid JSON: ") + e.what());
    }
    try {
        if (doc.at("schemaVersion").get<int>() != kSchemaVersion)
            throw SchemaVersionMismatch("instance: unsupported schema version " +
                                        doc.at("schemaVersion").dump());
        InstanceFile file;
        file.spec = genspec_from_json(doc.at("spec"));
        std::string kind = doc.at("kind").get<std::string>();
        if (kind == "chain") {
            ChainInstance inst;
            inst.label = doc.at("label").get<std::string>();
            inst.seed = doc.at("seed").get<std::uint64_t>();
            for (const json& op : doc.at("operators"))
                inst.operators.push_back(operator_from_json(op));
            inst.validate();
            file.instance = std::move(inst);
        } else if (kind == "tripartite") {
            TripartiteInstance inst{operator_from_json(doc.at("operators").at(0)),
                                    TensorShape{doc.at("tensorShape").get<std::vector<int>>()},
                                    doc.at("label").get<std::string>(),
                                    doc.at("seed").get<std::uint64_t>()};
            if (inst.shape.dim() != inst.rho.dim())
                throw ParseError("instance: tensorShape does not match operator dim");
            file.instance = std::move(inst);
        } else {
            throw ParseError("instance: unknown kind '" + kind + "'");
        }
        check_kind_invariants(file);
        return file;
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance: missing or mistyped field: ") + e.what());
    }
}

void save_json(const std::string& path, const json& doc) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open for writing: " + tmp);
        os << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

json load_json(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open: " + path);
    try {
        json doc;
        is >> doc;
        return doc;
    } catch (const json::exception& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
}

void save_instance(const std::string& path, const InstanceFile& file) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open for writing: " + tmp);
        os << instance_to_string(file);
    }
    std::filesystem::rename(tmp, path);
}

InstanceFile load_instance(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    try {
        return instance_from_string(ss.str());
    } catch (ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_swivels(const std::string& path, const SwivelAssignment& swivels) {
    json doc;
    doc["schemaVersion"] = kSchemaVersion;
    doc["fileType"] = "swivels";
    doc["toolVersion"] = toolVersion();
    json positions = json::array();
    for (const auto& pos : swivels.blocks) {
        json blocks = json::array();
        for (const auto& B : pos) blocks.push_back(matrix_to_json(B));
        positions.push_back(std::move(blocks));
    }
    doc["blocks"] = std::move(positions);
    save_json(path, doc);
}

SwivelAssignment load_swivels(const std::string& path) {
    json doc = load_json(path);
    try {
        if (doc.at("schemaVersion").get<int>() != kSchemaVersion)
            throw SchemaVersionMismatch("swivels: unsupported schema version");
        SwivelAssignment out;
        for (const json& pos : doc.at("blocks")) {
            std::vector<ComplexMatrix> blocks;
            for (const json& B : pos) blocks.push_back(matrix_from_json(B, "swivel block"));
            out.blocks.push_back(std::move(blocks));
        }
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("swivels: missing or mistyped field: ") + e.what());
    }
}

json genspec_to_json(const GenSpec& spec) {
    return json{{"kind", to_string(spec.kind)},   {"dim", spec.dim},
                {"factorDims", spec.factorDims},  {"L", spec.L},
                {"rank", spec.rank},              {"seed", spec.seed},
                {"conditionCap", spec.conditionCap}};
}

GenSpec genspec_from_json(const json& j) {
    try {
        GenSpec spec;
        spec.kind = gen_kind_from_string(j.at("kind").get<std::string>());
        spec.dim = j.at("dim").get<int>();
        spec.factorDims = j.at("factorDims").get<std::vector<int>>();
        spec.L = j.at("L").get<int>();
        spec.rank = j.at("rank").get<int>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        spec.conditionCap = j.at("conditionCap").get<double>();
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("spec: missing or mistyped field: ") + e.what());
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCsvRow>& rows,
                     const std::string& configLine) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open for writing: " + tmp);
        os << "# toolVersion=" << toolVersion() << "\n";
        os << "# config=" << configLine << "\n";
        os << "p,value,oracleValue,restartSpread\n";
        os.precision(17);
        for (const auto& r : rows) {
            os << r.p << "," << r.value << ",";
            if (r.oracleValue) os << *r.oracleValue;
            os << "," << r.restartSpread << "\n";
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace swivel
