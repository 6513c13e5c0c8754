// Command-line front end: instance generation, inequality verification,
// p-sweeps, and Lie-Trotter convergence tables.
//
// Exit codes: 0 = HOLDS, 1 = usage/input error, 2 = VIOLATED_BEYOND_TOL,
// 3 = INCONCLUSIVE_OPTIMIZER_GAP. Batch runs return the worst code.

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "swivel/runner.hpp"

namespace fs = std::filesystem;
using namespace swivel;
using nlohmann::json;

namespace {

int thread_budget() {
    const char* env = std::getenv("SWIVEL_NUM_THREADS");
    int n = env ? std::atoi(env) : 0;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, n);
}

// Work-stealing over [0, count); results land in caller-owned slots, so the
// merge is deterministic regardless of scheduling.
void parallel_for(int count, const std::function<void(int)>& fn) {
    int workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::string instance_label(const GeneratedInstance& inst) {
    if (std::holds_alternative<ChainInstance>(inst))
        return std::get<ChainInstance>(inst).label;
    return std::get<TripartiteInstance>(inst).label;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw InvalidSpec(std::string(what) + ": bad number '" + item + "'");
        }
    }
    if (out.empty()) throw InvalidSpec(std::string(what) + ": empty list");
    return out;
}

struct CommonFlags {
    std::uint64_t seed = 0;
    double tol = 1e-7;
    std::string out = ".";
    std::string emit = "report";
};

int cmd_gen(const GenSpec& base, int count, const std::string& outDir) {
    fs::create_directories(outDir);
    for (int i = 0; i < count; ++i) {
        GenSpec spec = base;
        spec.seed = base.seed + static_cast<std::uint64_t>(i);
        InstanceFile file{spec, generate(spec)};
        fs::path path = fs::path(outDir) / (spec.label() + ".json");
        save_instance(path.string(), file);
        std::cout << path.string() << "\n";
    }
    return 0;
}

int cmd_verify(const std::vector<std::string>& paths, const InequalityParams& prm,
               const CommonFlags& common) {
    struct Row {
        std::string path;
        VerifyStatus status = VerifyStatus::INCONCLUSIVE_OPTIMIZER_GAP;
        double slack = 0.0;
        std::string error;
    };
    std::vector<Row> rows(paths.size());
    fs::create_directories(common.out);

    parallel_for(static_cast<int>(paths.size()), [&](int i) {
        Row& row = rows[i];
        row.path = paths[i];
        try {
            InstanceFile file = load_instance(paths[i]);
            InequalityParams p = prm;
            p.opt.seed = common.seed;
            VerificationReport rep = verify_instance(file.instance, p);
            row.status = rep.status;
            row.slack = rep.slack;

            fs::path base = fs::path(common.out) /
                            (instance_label(file.instance) + "." + prm.inequality);
            if (common.emit == "report" || common.emit == "both")
                save_json(base.string() + ".report.json",
                          report_to_json(rep, file.spec, p));
            if ((common.emit == "csv" || common.emit == "both") && !rep.curve.empty()) {
                std::vector<SweepCsvRow> csv;
                for (size_t k = 0; k < rep.curve.size(); ++k) {
                    SweepCsvRow r;
                    r.p = rep.curve[k].first;
                    r.value = rep.curve[k].second;
                    if (k < rep.oracleCurve.size()) r.oracleValue = rep.oracleCurve[k];
                    csv.push_back(r);
                }
                write_sweep_csv(base.string() + ".curve.csv", csv,
                                report_to_json(rep, file.spec, p)["parameters"].dump());
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    bool anyError = false, anyViolated = false, anyInconclusive = false;
    double minSlack = kInfinity, sumSlack = 0.0;
    std::string worstPath;
    int counted = 0;
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            std::cerr << "error: " << row.path << ": " << row.error << "\n";
            anyError = true;
            continue;
        }
        ++counted;
        sumSlack += row.slack;
        if (row.slack < minSlack) {
            minSlack = row.slack;
            worstPath = row.path;
        }
        std::cout << row.path << ": " << to_string(row.status)
                  << " (slack=" << row.slack << ")\n";
        anyViolated |= row.status == VerifyStatus::VIOLATED_BEYOND_TOL;
        anyInconclusive |= row.status == VerifyStatus::INCONCLUSIVE_OPTIMIZER_GAP;
    }
    if (counted > 1) {
        std::cout << "summary: instances=" << counted << " minSlack=" << minSlack
                  << " meanSlack=" << (sumSlack / counted) << " worst=" << worstPath
                  << "\n";
    }
    if (anyError) return 1;
    if (anyViolated) return 2;
    if (anyInconclusive) return 3;
    return 0;
}

int cmd_sweep(const std::string& path, std::vector<double> pGrid, bool withOracle,
              int gridPoints, const CommonFlags& common, const std::string& outFile) {
    InstanceFile file = load_instance(path);
    if (!std::holds_alternative<ChainInstance>(file.instance))
        throw InvalidSpec("sweep needs a chain instance; use verify --ineq monotone "
                          "for tripartite instances");
    const auto& inst = std::get<ChainInstance>(file.instance);
    if (pGrid.empty()) pGrid = default_p_grid(false);

    OptimizerConfig cfg;
    cfg.seed = common.seed;
    auto sweep = sweep_p(inst, pGrid, cfg);

    std::vector<SweepCsvRow> rows;
    for (const auto& pt : sweep) {
        SweepCsvRow row;
        row.p = pt.p;
        row.value = pt.result.value;
        auto [lo, hi] = std::minmax_element(pt.result.perRestartValues.begin(),
                                            pt.result.perRestartValues.end());
        row.restartSpread = *hi - *lo;
        if (withOracle) row.oracleValue = brute_force_phase_grid(inst, pt.p, gridPoints);
        rows.push_back(row);
    }
    json cfgDoc{{"instance", path},
                {"seed", common.seed},
                {"pGrid", pGrid},
                {"withOracle", withOracle},
                {"gridPoints", gridPoints}};
    write_sweep_csv(outFile, rows, cfgDoc.dump());
    std::cout << outFile << "\n";
    return 0;
}

int cmd_trotter(const std::string& path, std::vector<double> pList,
                const CommonFlags& common, const std::string& outFile) {
    InstanceFile file = load_instance(path);
    if (!std::holds_alternative<ChainInstance>(file.instance))
        throw InvalidSpec("trotter needs a chain instance");
    const auto& inst = std::get<ChainInstance>(file.instance);
    if (pList.empty())
        for (double p = 2.0; p <= 1024.0; p *= 2.0) pList.push_back(p);

    auto table = lie_trotter_convergence(inst, pList);
    std::string tmp = outFile + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open for writing: " + tmp);
        os << "# toolVersion=" << toolVersion() << "\n";
        os << "# instance=" << path << " seed=" << common.seed << "\n";
        os << "p,value,error\n";
        os.precision(17);
        for (const auto& row : table)
            os << row.p << "," << row.value << "," << row.error << "\n";
    }
    fs::rename(tmp, outFile);
    std::cout << outFile << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swivel: numerical verification of chained Schatten-norm inequalities"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate seeded instances");
    std::string kindStr = "pd";
    GenSpec spec;
    int count = 1;
    std::string genOut = ".";
    std::string dimsStr;
    gen->add_option("--kind", kindStr,
                    "psd|pd|density|rankDeficient|commutingFamily|tripartiteDensity");
    gen->add_option("--dim", spec.dim, "operator dimension");
    gen->add_option("--dims", dimsStr, "tripartite factor dims, e.g. 2,2,2");
    gen->add_option("--L", spec.L, "chain length");
    gen->add_option("--rank", spec.rank, "rank for rankDeficient");
    gen->add_option("--seed", spec.seed, "base seed");
    gen->add_option("--condition-cap", spec.conditionCap, "max condition number for pd");
    gen->add_option("--count", count, "number of instances (derived seeds seed+i)")
        ->check(CLI::PositiveNumber);
    gen->add_option("--out", genOut, "output directory");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "verify an inequality on instances");
    std::string ineq = "hirschman";
    InequalityParams prm;
    CommonFlags common;
    std::vector<std::string> paths;
    std::string pGridStr;
    verify->add_option("--ineq", ineq, "monotone|hirschman|gt")->required();
    verify->add_option("--p", prm.p, "outer exponent");
    verify->add_option("--q", prm.q, "inner exponent");
    verify->add_option("--p-grid", pGridStr, "comma list for monotone runs");
    verify->add_option("--tol", common.tol, "HOLDS slack tolerance");
    verify->add_option("--seed", common.seed, "optimizer seed");
    verify->add_flag("--with-oracle", prm.withOracle, "exhaustive phase-grid oracle");
    verify->add_option("--grid-points", prm.gridPoints, "oracle grid resolution");
    verify->add_option("--emit", common.emit, "report|csv|both");
    verify->add_option("--out", common.out, "output directory");
    verify->add_option("instances", paths, "instance files")->required();

    // ---- sweep ----
    auto* sweepCmd = app.add_subcommand("sweep", "optimizer sweep over p, CSV output");
    std::string sweepPath, sweepOut = "sweep.csv", sweepGridStr;
    bool sweepOracle = false;
    int sweepGridPoints = 720;
    CommonFlags sweepCommon;
    sweepCmd->add_option("--p-grid", sweepGridStr, "comma list of exponents");
    sweepCmd->add_flag("--with-oracle", sweepOracle, "add the phase-grid oracle column");
    sweepCmd->add_option("--grid-points", sweepGridPoints, "oracle grid resolution");
    sweepCmd->add_option("--seed", sweepCommon.seed, "optimizer seed");
    sweepCmd->add_option("--out", sweepOut, "CSV path");
    sweepCmd->add_option("instance", sweepPath, "instance file")->required();

    // ---- trotter ----
    auto* trotter = app.add_subcommand("trotter", "Lie-Trotter convergence table");
    std::string trotPath, trotOut = "trotter.csv", pListStr;
    CommonFlags trotCommon;
    trotter->add_option("--p-list", pListStr, "comma list of exponents");
    trotter->add_option("--out", trotOut, "CSV path");
    trotter->add_option("instance", trotPath, "instance file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints usage/help
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            spec.kind = gen_kind_from_string(kindStr);
            if (!dimsStr.empty()) {
                spec.factorDims.clear();
                for (double d : parse_double_list(dimsStr, "--dims"))
                    spec.factorDims.push_back(static_cast<int>(d));
            }
            return cmd_gen(spec, count, genOut);
        }
        if (verify->parsed()) {
            prm.inequality = ineq;
            prm.tol = common.tol;
            if (!pGridStr.empty()) prm.pGrid = parse_double_list(pGridStr, "--p-grid");
            if (ineq == "hirschman" && !(prm.q >= 1.0 && prm.q < prm.p))
                throw InvalidSpec("hirschman requires 1 <= q < p");
            return cmd_verify(paths, prm, common);
        }
        if (sweepCmd->parsed()) {
            std::vector<double> grid;
            if (!sweepGridStr.empty()) grid = parse_double_list(sweepGridStr, "--p-grid");
            return cmd_sweep(sweepPath, grid, sweepOracle, sweepGridPoints, sweepCommon,
                             sweepOut);
        }
        if (trotter->parsed()) {
            std::vector<double> pl;
            if (!pListStr.empty()) pl = parse_double_list(pListStr, "--p-list");
            return cmd_trotter(trotPath, pl, trotCommon, trotOut);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
