#include "swivel/instgen.hpp"

#include <nlohmann/json.hpp>

#include "test_support.hpp"

using namespace swivel;

TEST_CASE("hex_double: exact round trips") {
    for (double x : {0.0, -0.0, 1.0, -1.0 / 3.0, 1e-308, 6.02e23, M_PI, 0x1.fffffffffffffp+1023}) {
        double back = parse_hex_double(hex_double(x));
        CHECK(std::memcmp(&back, &x, sizeof(double)) == 0);
    }
    CHECK_THROWS_AS(parse_hex_double("zzz"), ParseError);
    CHECK_THROWS_AS(parse_hex_double("0x1p+1 trailing"), ParseError);
}

TEST_CASE("generate: per-kind invariants") {
    GenSpec density;
    density.kind = GenKind::Density;
    density.dim = 3;
    density.L = 2;
    density.seed = 7;
    ChainInstance d = std::get<ChainInstance>(generate(density));
    for (const auto& C : d.operators) CHECK(std::abs(C.trace() - 1.0) <= 1e-12);

    GenSpec rd;
    rd.kind = GenKind::RankDeficient;
    rd.dim = 3;
    rd.rank = 1;
    rd.L = 1;
    rd.seed = 8;
    ChainInstance r = std::get<ChainInstance>(generate(rd));
    CHECK(r.operators[0].supportRank() == 1);

    GenSpec cf;
    cf.kind = GenKind::CommutingFamily;
    cf.dim = 4;
    cf.L = 3;
    cf.seed = 9;
    ChainInstance c = std::get<ChainInstance>(generate(cf));
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            ComplexMatrix comm = c.operators[i].matrix() * c.operators[j].matrix() -
                                 c.operators[j].matrix() * c.operators[i].matrix();
            CHECK(comm.norm() <= 1e-10);
        }

    GenSpec pd;
    pd.kind = GenKind::Pd;
    pd.dim = 4;
    pd.L = 1;
    pd.seed = 10;
    pd.conditionCap = 50.0;
    ChainInstance p = std::get<ChainInstance>(generate(pd));
    const auto& ev = p.operators[0].eigenvalues();
    CHECK(ev(0) / ev(3) <= 50.0 * (1.0 + 1e-12));
    CHECK(ev(3) > 0.0);

    GenSpec tri;
    tri.kind = GenKind::TripartiteDensity;
    tri.factorDims = {2, 2, 2};
    tri.seed = 11;
    TripartiteInstance t = std::get<TripartiteInstance>(generate(tri));
    CHECK(std::abs(t.rho.trace() - 1.0) <= 1e-12);
    CHECK(t.shape.dim() == 8);

    GenSpec bad;
    bad.kind = GenKind::RankDeficient;
    bad.dim = 2;
    bad.rank = 5;
    CHECK_THROWS_AS(generate(bad), InvalidSpec);
    GenSpec badTri;
    badTri.kind = GenKind::TripartiteDensity;
    badTri.factorDims = {2, 2};
    CHECK_THROWS_AS(generate(badTri), InvalidSpec);
}

TEST_CASE("serialization: determinism and bit-exact round trips") {
    GenSpec spec;
    spec.kind = GenKind::Pd;
    spec.dim = 3;
    spec.L = 2;
    spec.seed = 12345;
    InstanceFile f1{spec, generate(spec)};
    InstanceFile f2{spec, generate(spec)};
    CHECK(instance_to_string(f1) == instance_to_string(f2));

    InstanceFile back = instance_from_string(instance_to_string(f1));
    CHECK(instance_to_string(back) == instance_to_string(f1));

    const auto& a = std::get<ChainInstance>(f1.instance);
    const auto& b = std::get<ChainInstance>(back.instance);
    REQUIRE(a.operators.size() == b.operators.size());
    for (size_t i = 0; i < a.operators.size(); ++i) {
        CHECK((a.operators[i].eigenvalues() - b.operators[i].eigenvalues()).norm() == 0.0);
        CHECK((a.operators[i].eigenvectors() - b.operators[i].eigenvectors()).norm() == 0.0);
        CHECK((a.operators[i].matrix() - b.operators[i].matrix()).norm() == 0.0);
    }
}

TEST_CASE("serialization: file round trip and cross-module marginals") {
    GenSpec tri;
    tri.kind = GenKind::TripartiteDensity;
    tri.factorDims = {2, 2, 2};
    tri.seed = 99;
    InstanceFile file{tri, generate(tri)};
    std::string path = "/tmp/swivel_test_instance.json";
    save_instance(path, file);
    InstanceFile loaded = load_instance(path);

    const auto& mem = std::get<TripartiteInstance>(file.instance);
    const auto& disk = std::get<TripartiteInstance>(loaded.instance);
    ComplexMatrix memMarg = partial_trace(mem.rho.matrix(), mem.shape, {0});
    ComplexMatrix diskMarg = partial_trace(disk.rho.matrix(), disk.shape, {0});
    CHECK((memMarg - diskMarg).norm() == 0.0);
}

TEST_CASE("serialization: validation failures carry context") {
    GenSpec spec;
    spec.kind = GenKind::Density;
    spec.dim = 2;
    spec.L = 1;
    spec.seed = 5;
    InstanceFile file{spec, generate(spec)};
    nlohmann::json doc = nlohmann::json::parse(instance_to_string(file));

    nlohmann::json badVersion = doc;
    badVersion["schemaVersion"] = 999;
    CHECK_THROWS_AS(instance_from_string(badVersion.dump()), SchemaVersionMismatch);

    // scale the eigenvalues so the trace is off: loader must name the invariant
    nlohmann::json badTrace = doc;
    badTrace["operators"][0]["eigenvalues"][0] = hex_double(5.0);
    try {
        instance_from_string(badTrace.dump());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("unit-trace") != std::string::npos);
    }

    nlohmann::json badHex = doc;
    badHex["operators"][0]["eigenvalues"][0] = "not-a-number";
    CHECK_THROWS_AS(instance_from_string(badHex.dump()), ParseError);

    CHECK_THROWS_AS(instance_from_string("{ not json"), ParseError);
}

TEST_CASE("swivel assignments: save and load") {
    GenSpec spec;
    spec.kind = GenKind::Psd;
    spec.dim = 3;
    spec.L = 2;
    spec.seed = 21;
    ChainInstance inst = std::get<ChainInstance>(generate(spec));
    OptimizerConfig cfg;
    cfg.restarts = 2;
    cfg.maxIters = 20;
    OptResult r = maximize_over_swivels(inst, 2.0, cfg);

    std::string path = "/tmp/swivel_test_swivels.json";
    save_swivels(path, r.bestSwivels);
    SwivelAssignment back = load_swivels(path);
    REQUIRE(back.blocks.size() == r.bestSwivels.blocks.size());
    double v1 = chain_norm(inst, r.bestSwivels, 2.0);
    double v2 = chain_norm(inst, back, 2.0);
    CHECK(v1 == v2);
}
