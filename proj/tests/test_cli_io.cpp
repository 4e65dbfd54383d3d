#include "badapprox/commands.hpp"
#include "badapprox/errors.hpp"
#include "badapprox/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace badapprox;
using namespace badapprox::io;

namespace {

std::string scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("badapprox_test_" + name);
    std::filesystem::remove_all(p);
    return p.string();
}

ConstructionParams fixture(unsigned stages = 3) {
    ConstructionParams p;
    p.max_stage = stages;
    return p;
}

std::size_t lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("sha256 of known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("seed ball and scale spec parsing") {
    auto [c, r] = parse_seed_ball("1/2;1/4");
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Rational(1, 2));
    CHECK(r == Rational(1, 4));
    auto [c2, r2] = parse_seed_ball("1/3,2/5;1/100");
    CHECK(c2.size() == 2);
    CHECK(c2[1] == Rational(2, 5));
    CHECK(r2 == Rational(1, 100));
    CHECK(format_seed_ball(c2, r2) == "1/3,2/5;1/100");
    CHECK_THROWS_AS(parse_seed_ball("1/2"), InvalidParams);

    auto [lo, hi] = parse_scale_spec("2^-4..2^-12");
    CHECK(lo == 4);
    CHECK(hi == 12);
    CHECK_THROWS_AS(parse_scale_spec("2^-4..2^-4"), InvalidParams);
    CHECK_THROWS_AS(parse_scale_spec("3^-4..3^-9"), InvalidParams);
    CHECK_THROWS_AS(parse_scale_spec("2^-4"), InvalidParams);
}

TEST_CASE("run config round trip and unknown keys") {
    RunConfig c;
    c.params.tau = Rational(3, 1);
    c.seed_center = RationalVec{Rational(1, 2)};
    c.seed_radius = Rational(1, 4);
    c.rng_seed = 9;
    c.which = {"measure"};
    const RunConfig back = RunConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.params.tau == 3);
    CHECK_THROWS_AS(RunConfig::from_json(Json{{"tua", "2/1"}}), InvalidParams);
    CHECK_THROWS_AS(RunConfig::from_json(Json{{"policy", "sometimes"}}), InvalidParams);
}

TEST_CASE("checkpoint round trip reproduces survival answers") {
    PruningState st(fixture());
    resolve_all_stages(st);
    const Json j = checkpoint_json(st);
    auto loaded = load_checkpoint(j);
    CHECK(loaded->params() == st.params());
    CHECK(loaded->enumerated_removals() == st.enumerated_removals());
    CHECK(dump(checkpoint_json(*loaded)) == dump(j));

    std::mt19937_64 rng(21);
    for (unsigned n = 1; n <= 3; ++n) {
        const unsigned lvl = st.level(n);
        const unsigned long cells = st.grid().cells_per_axis(lvl).get_ui();
        for (int i = 0; i < 300; ++i) {
            const GridCube c{lvl, {Integer(static_cast<unsigned long>(rng() % cells))}};
            CHECK(loaded->survives(c) == st.survives(c));
        }
    }
    // removed cubes recorded per stage are exactly the non-survivors under surviving parents
    for (const auto& [stage, removed] : st.enumerated_removals())
        for (const auto& c : removed) {
            CHECK_FALSE(loaded->survives(c));
            if (stage > 1) CHECK(loaded->survives(st.grid().ancestor(c, st.level(stage - 1))));
        }
}

TEST_CASE("checkpoint bytes are stable across builds") {
    PruningState a(fixture()), b(fixture());
    resolve_all_stages(a);
    resolve_all_stages(b);
    CHECK(sha256_hex(dump(checkpoint_json(a))) == sha256_hex(dump(checkpoint_json(b))));
}

TEST_CASE("checkpoint loader rejects bad files") {
    PruningState st(fixture(2));
    Json j = checkpoint_json(st);
    Json wrong = j;
    wrong["version"] = kCheckpointVersion + 1;
    CHECK_THROWS_WITH_AS(load_checkpoint(wrong), doctest::Contains("version mismatch"), FormatError);
    Json tampered = j;
    tampered["schedule"][0]["prune_level"] = 7;
    CHECK_THROWS_WITH_AS(load_checkpoint(tampered), doctest::Contains("does not match"), FormatError);
    Json other = j;
    other["schema"] = "something-else";
    CHECK_THROWS_AS(load_checkpoint(other), FormatError);
    Json bad = j;
    bad["params"]["u"] = 3;
    CHECK_THROWS_AS(load_checkpoint(bad), InvalidParams);
    CHECK_THROWS_AS(parse_json("{ not json", "x"), FormatError);
}

TEST_CASE("cmd_build writes a checkpoint with the requested stage count") {
    RunConfig cfg;
    cfg.depth = 3;
    cfg.out = scratch("build");
    const auto rep = cmd_build(cfg);
    CHECK(rep.ok());
    const Json j = parse_json(read_file(cfg.out + "/checkpoint.json"), "checkpoint");
    CHECK(j["params"]["max_stage"] == 3);
    CHECK(j["schedule"].size() == 3);
    CHECK(j["enumerated"].size() == 3);
    REQUIRE(rep.artifacts.size() == 1);
    CHECK(rep.artifacts[0].second == sha256_hex(read_file(cfg.out + "/checkpoint.json")));

    // rebuild is byte identical, reports included
    const std::string first = read_file(cfg.out + "/build-report.json");
    cmd_build(cfg);
    CHECK(read_file(cfg.out + "/build-report.json") == first);
    CHECK(cmd_build(cfg).artifacts == rep.artifacts);
}

TEST_CASE("cmd_build rejects invalid params and writes nothing") {
    RunConfig cfg;
    cfg.params.u = 3;
    cfg.out = scratch("build_bad");
    CHECK_THROWS_WITH_AS(cmd_build(cfg), doctest::Contains("u >= 4 required"), InvalidParams);
    CHECK_FALSE(std::filesystem::exists(cfg.out));

    RunConfig t;
    t.params.t = 1;
    t.out = cfg.out;
    CHECK_THROWS_WITH_AS(cmd_build(t), doctest::Contains("t^d > d!"), InvalidParams);

    // d = 2 full enumeration is over budget: partial checkpoints never appear
    RunConfig d2;
    d2.params.d = 2;
    d2.params.tau = 1;
    d2.depth = 1;
    d2.out = cfg.out;
    CHECK_THROWS_AS(cmd_build(d2), BudgetExceeded);
    CHECK_FALSE(std::filesystem::exists(cfg.out + "/checkpoint.json"));
    d2.lazy = true;
    CHECK(cmd_build(d2).ok());
    CHECK(std::filesystem::exists(cfg.out + "/checkpoint.json"));
}

TEST_CASE("cmd_verify suites and the exit status contract") {
    RunConfig cfg;
    cfg.depth = 2;
    cfg.out = scratch("verify");
    cmd_build(cfg);
    const std::string ck = cfg.out + "/checkpoint.json";

    cfg.which = {"measure", "avoidance", "leading", "retention"};
    const auto rep = cmd_verify(cfg, ck);
    CHECK(rep.ok());
    CHECK(exit_status(rep) == 0);
    bool saw_measure = false;
    for (const auto& c : rep.checks)
        if (c.name == "measure.stage2") {
            saw_measure = true;
            CHECK(c.counts["exact"] == "16373/16384");
            CHECK(c.counts["closed_form_bound"] == "1021/1024");
        }
    CHECK(saw_measure);

    cfg.which = {"qapprox"};
    CHECK_THROWS_WITH_AS(cmd_verify(cfg, ck), doctest::Contains("--rng-seed"), InvalidParams);
    cfg.which = {"avoidance"};
    cfg.q_cap = Integer(4);
    CHECK_THROWS_WITH_AS(cmd_verify(cfg, ck), doctest::Contains("qCap must be < N^n"), InvalidParams);
    cfg.q_cap.reset();
    cfg.which = {"nonsense"};
    CHECK_THROWS_AS(cmd_verify(cfg, ck), InvalidParams);

    ReportBundle bad;
    bad.command = "x";
    CheckResult f;
    f.name = "f";
    f.status = Status::Fail;
    bad.checks.push_back(f);
    CheckResult s;
    s.name = "s";
    bad.checks.push_back(s);
    CHECK(exit_status(bad) == 1);
    bad.checks.front().status = Status::Pass;
    CHECK(exit_status(bad) == 0);
    CHECK(bad.to_text().find("SKIP") != std::string::npos);
}

TEST_CASE("cmd_subset and cmd_dimension on a depth-1 tree") {
    RunConfig cfg;
    cfg.depth = 3;
    cfg.out = scratch("subset");
    cmd_build(cfg);
    const std::string ck = cfg.out + "/checkpoint.json";

    cfg.depth = 1;
    cfg.policy = GPolicy::Report;
    cfg.rng_seed = 1;
    CHECK_THROWS_WITH_AS(cmd_subset(cfg, ck), doctest::Contains("--seed-ball"), InvalidParams);
    cfg.seed_center = RationalVec{Rational(9, 10)};
    cfg.seed_radius = Rational(1, 4);
    CHECK_THROWS_WITH_AS(cmd_subset(cfg, ck), doctest::Contains("inside [0,1]"), InvalidParams);
    cfg.seed_center = RationalVec{Rational(1, 2)};

    const auto rep = cmd_subset(cfg, ck);
    const std::string csv = read_file(cfg.out + "/deepest.csv");
    CHECK(csv.rfind("index,stage,q,x1,mass\n", 0) == 0);
    CHECK(lines(csv) == 4);
    CHECK(csv.find("291/1163") != std::string::npos);
    const Json tree = parse_json(read_file(cfg.out + "/tree.json"), "tree");
    CHECK(tree["status"]["complete"] == true);
    CHECK(tree["layers"][1].size() == 3);
    CHECK(tree["s"] == "2/3");
    for (const auto& c : rep.checks) {
        if (c.name == "tree.build" || c.name == "tree.verify" || c.name == "holder.nodes") CHECK(c.status == Status::Pass);
        // sampled bound constant below 1 rules out the sampled check
        if (c.name == "holder.samples") CHECK(c.status == Status::Fail);
        if (c.name == "certificate") CHECK(c.counts["epsilon"] == "1/10");
    }
    CHECK(exit_status(rep) == 1);

    // same config, same bytes
    const std::string before = read_file(cfg.out + "/tree.json");
    cmd_subset(cfg, ck);
    CHECK(read_file(cfg.out + "/tree.json") == before);

    const auto dim = cmd_dimension(cfg, cfg.out + "/tree.json");
    const std::string box = read_file(cfg.out + "/boxcount.csv");
    CHECK(lines(box) == 10);  // header + 9 scales for 2^-4..2^-12
    CHECK(box.rfind("scale_num,scale_den_log,count\n1,4,", 0) == 0);
    CHECK(dim.checks.front().counts["s"] == "2/3");
    CHECK(dim.checks.front().counts.contains("slope"));

    cfg.scales = "2^-4..2^-4";
    CHECK_THROWS_AS(cmd_dimension(cfg, cfg.out + "/tree.json"), InvalidParams);
}
