#include "badapprox/io.hpp"

#include "badapprox/errors.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#ifndef BADAPPROX_VERSION
#define BADAPPROX_VERSION "0.0.0"
#endif

namespace badapprox::io {

namespace {

Json vec_json(const RationalVec& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
}

RationalVec vec_from(const Json& j) {
    RationalVec v;
    for (const auto& x : j) v.push_back(parse_rational(x.get<std::string>()));
    return v;
}

// Integers may be given as JSON numbers or decimal strings.
Integer integer_from(const Json& j) {
    if (j.is_number_integer()) return Integer(j.get<long>());
    if (j.is_string()) return parse_integer(j.get<std::string>());
    throw InvalidParams("expected an integer, got " + j.dump());
}

Rational rational_from(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw InvalidParams("expected a rational \"a/b\", got " + j.dump());
}

unsigned unsigned_from(const Json& j, const char* key) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw InvalidParams(std::string(key) + " must be a nonnegative integer");
    return j.get<unsigned>();
}

const char* starred_name(Starred s) {
    switch (s) {
        case Starred::Yes: return "yes";
        case Starred::No: return "no";
        case Starred::Unresolved: return "unresolved";
    }
    return "?";
}

Starred starred_from(const std::string& s) {
    if (s == "yes") return Starred::Yes;
    if (s == "no") return Starred::No;
    if (s == "unresolved") return Starred::Unresolved;
    throw FormatError("bad starred value " + s);
}

void expect_schema(const Json& j, const char* schema, int version) {
    if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
        throw FormatError(std::string("not a ") + schema + " file");
    if (!j.contains("version") || j["version"] != version)
        throw FormatError(std::string(schema) + " version mismatch: file has " +
                          (j.contains("version") ? j["version"].dump() : "none") + ", tool reads " +
                          std::to_string(version));
}

const char* policy_name(GPolicy p) { return p == GPolicy::Enforce ? "enforce" : "report"; }

}  // namespace

std::string tool_version() { return BADAPPROX_VERSION; }

// ---------------------------------------------------------------------------
// Config

std::pair<RationalVec, Rational> parse_seed_ball(std::string_view text) {
    const auto semi = text.find(';');
    if (semi == std::string_view::npos) throw InvalidParams("seed ball must look like \"c1,...,cd;r\"");
    RationalVec c;
    std::string_view centers = text.substr(0, semi);
    while (!centers.empty()) {
        const auto comma = centers.find(',');
        c.push_back(parse_rational(centers.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        centers.remove_prefix(comma + 1);
    }
    if (c.empty()) throw InvalidParams("seed ball needs a center");
    return {c, parse_rational(text.substr(semi + 1))};
}

std::string format_seed_ball(const RationalVec& c, const Rational& r) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + to_string(c[i]);
    return s + ";" + to_string(r);
}

std::pair<unsigned, unsigned> parse_scale_spec(std::string_view text) {
    const auto dots = text.find("..");
    auto exponent = [](std::string_view part) {
        if (part.substr(0, 3) != "2^-") throw InvalidParams("scales must look like 2^-a..2^-b");
        part.remove_prefix(3);
        if (part.empty() || part.find_first_not_of("0123456789") != std::string_view::npos)
            throw InvalidParams("scales must look like 2^-a..2^-b");
        return static_cast<unsigned>(std::stoul(std::string(part)));
    };
    if (dots == std::string_view::npos) throw InvalidParams("scales must look like 2^-a..2^-b");
    const unsigned lo = exponent(text.substr(0, dots)), hi = exponent(text.substr(dots + 2));
    if (hi < lo + 1) throw InvalidParams("need at least 2 scales");
    return {lo, hi};
}

Json RunConfig::to_json() const {
    Json j;
    j["d"] = params.d;
    j["tau"] = to_string(params.tau);
    j["M"] = to_string(params.m);
    j["t"] = to_string(params.t);
    j["u"] = params.u;
    j["depth"] = depth;
    j["epsilon"] = to_string(epsilon);
    if (seed_center && seed_radius) j["seed_ball"] = format_seed_ball(*seed_center, *seed_radius);
    if (q_cap) j["qcap"] = to_string(*q_cap);
    if (rng_seed) j["rng_seed"] = *rng_seed;
    j["samples"] = samples;
    j["simplex_q"] = simplex_q;
    j["policy"] = policy_name(policy);
    j["lazy"] = lazy;
    j["which"] = which;
    j["scales"] = scales;
    j["out"] = out;
    return j;
}

RunConfig RunConfig::from_json(const Json& j) {
    if (!j.is_object()) throw InvalidParams("config must be a JSON object");
    RunConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "d") c.params.d = unsigned_from(v, "d");
        else if (key == "tau") c.params.tau = rational_from(v);
        else if (key == "M") c.params.m = integer_from(v);
        else if (key == "t") c.params.t = integer_from(v);
        else if (key == "u") c.params.u = unsigned_from(v, "u");
        else if (key == "depth") c.depth = unsigned_from(v, "depth");
        else if (key == "epsilon") c.epsilon = rational_from(v);
        else if (key == "seed_ball") {
            auto [center, r] = parse_seed_ball(v.get<std::string>());
            c.seed_center = center;
            c.seed_radius = r;
        } else if (key == "qcap") c.q_cap = integer_from(v);
        else if (key == "rng_seed") c.rng_seed = v.get<std::uint64_t>();
        else if (key == "samples") c.samples = v.get<std::uint64_t>();
        else if (key == "simplex_q") c.simplex_q = unsigned_from(v, "simplex_q");
        else if (key == "policy") {
            const auto s = v.get<std::string>();
            if (s != "enforce" && s != "report") throw InvalidParams("policy must be enforce or report");
            c.policy = s == "enforce" ? GPolicy::Enforce : GPolicy::Report;
        } else if (key == "lazy") c.lazy = v.get<bool>();
        else if (key == "which") c.which = v.get<std::vector<std::string>>();
        else if (key == "scales") c.scales = v.get<std::string>();
        else if (key == "out") c.out = v.get<std::string>();
        else throw InvalidParams("unknown config key \"" + key + "\"");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Params and cubes

Json to_json(const ConstructionParams& p) {
    Json j;
    j["d"] = p.d;
    j["tau"] = to_string(p.tau);
    j["M"] = to_string(p.m);
    j["t"] = to_string(p.t);
    j["u"] = p.u;
    j["max_stage"] = p.max_stage;
    return j;
}

ConstructionParams params_from_json(const Json& j) {
    ConstructionParams p;
    p.d = unsigned_from(j.at("d"), "d");
    p.tau = rational_from(j.at("tau"));
    p.m = integer_from(j.at("M"));
    p.t = integer_from(j.at("t"));
    p.u = unsigned_from(j.at("u"), "u");
    p.max_stage = unsigned_from(j.at("max_stage"), "max_stage");
    p.validate();
    return p;
}

Json to_json(const GridCube& c) {
    Json idx = Json::array();
    for (const auto& i : c.index) idx.push_back(i.get_str());
    return Json{{"level", c.level}, {"index", idx}};
}

GridCube cube_from_json(const Json& j) {
    GridCube c;
    c.level = j.at("level").get<unsigned>();
    for (const auto& i : j.at("index")) c.index.push_back(integer_from(i));
    return c;
}

// ---------------------------------------------------------------------------
// Checkpoints

void resolve_all_stages(PruningState& state) {
    const Grid& grid = state.grid();
    const unsigned d = state.params().d;
    for (unsigned k = 1; k <= state.max_stage(); ++k) {
        std::vector<GridCube> parents;
        if (k == 1) {
            IndexVec lo(d, Integer(0)), hi(d, Integer(state.params().t - 1));
            for_each_index(lo, hi, [&](const IndexVec& idx) { parents.push_back(GridCube{0, idx}); });
        } else {
            state.for_each_survivor(k - 1, [&](const GridCube& c) { parents.push_back(c); });
        }
        const unsigned lvl = state.level(k);
        Integer total = 0;
        for (const auto& c : parents) total += grid.descendant_count(c, lvl);
        if (total > Integer(static_cast<unsigned long>(state.budget())))
            throw BudgetExceeded("enumerating stage " + std::to_string(k) + " needs " + total.get_str() +
                                 " cubes (budget " + std::to_string(state.budget()) + ")");
        std::set<GridCube> removed;
        for (const auto& c : parents)
            grid.for_each_descendant(c, lvl, [&](const GridCube& child) {
                if (!state.survives(child)) removed.insert(child);
            });
        state.record_enumeration(k, std::move(removed));
    }
}

Json checkpoint_json(const PruningState& state) {
    const ConstructionParams& p = state.params();
    Json j;
    j["schema"] = "badapprox-checkpoint";
    j["version"] = kCheckpointVersion;
    j["tool_version"] = tool_version();
    j["params"] = to_json(p);

    Json sched = Json::array();
    for (unsigned n = 1; n <= p.max_stage; ++n) {
        const auto& s = state.schedule(n);
        sched.push_back({{"stage", n}, {"prune_level", s.prune_level}, {"delta", to_string(s.delta)},
                         {"c_n", to_string(s.c_n)}});
    }
    j["schedule"] = sched;

    std::map<unsigned, std::array<std::uint64_t, 3>> tally;  // records, starred, unresolved
    Json recs = Json::array();
    for (const auto& [host, rec] : state.records_snapshot()) {
        Json r;
        r["stage"] = rec.stage;
        r["host"] = to_json(host);
        Json pts = Json::array();
        for (const auto& pt : rec.rationals) pts.push_back(pt.to_string());
        r["rationals"] = pts;
        if (rec.flat) {
            Json dirs = Json::array();
            for (const auto& v : rec.flat->directions()) dirs.push_back(vec_json(v));
            r["flat"] = {{"base", vec_json(rec.flat->base())}, {"directions", dirs}};
        } else {
            r["flat"] = nullptr;
        }
        r["starred"] = starred_name(rec.starred);
        r["witness"] = rec.witness ? Json(rec.witness->to_string()) : Json(nullptr);
        recs.push_back(std::move(r));
        auto& t = tally[rec.stage];
        ++t[0];
        if (rec.starred == Starred::Yes) ++t[1];
        if (rec.starred == Starred::Unresolved) ++t[2];
    }
    j["records"] = recs;

    Json en = Json::array();
    for (const auto& [stage, removed] : state.enumerated_removals()) {
        Json cubes = Json::array();
        for (const auto& c : removed) {
            Json idx = Json::array();
            for (const auto& i : c.index) idx.push_back(i.get_str());
            cubes.push_back(idx);
        }
        en.push_back({{"stage", stage}, {"level", state.level(stage)}, {"removed", cubes}});
    }
    j["enumerated"] = en;

    Json stats = Json::array();
    for (unsigned n = 1; n <= p.max_stage; ++n) {
        const auto t = tally[n];
        Json s{{"stage", n}, {"records", t[0]}, {"starred", t[1]}, {"unresolved", t[2]}};
        const auto it = state.enumerated_removals().find(n);
        s["removed"] = it == state.enumerated_removals().end() ? Json(nullptr) : Json(it->second.size());
        stats.push_back(s);
    }
    j["stats"] = stats;
    return j;
}

std::unique_ptr<PruningState> load_checkpoint(const Json& j) {
    expect_schema(j, "badapprox-checkpoint", kCheckpointVersion);
    try {
        auto state = std::make_unique<PruningState>(params_from_json(j.at("params")));
        const auto& sched = j.at("schedule");
        if (sched.size() != state->max_stage()) throw FormatError("schedule length differs from max_stage");
        for (unsigned n = 1; n <= state->max_stage(); ++n) {
            const auto& s = state->schedule(n);
            const auto& e = sched[n - 1];
            if (e.at("prune_level") != s.prune_level || e.at("delta") != to_string(s.delta) ||
                e.at("c_n") != to_string(s.c_n))
                throw FormatError("schedule of stage " + std::to_string(n) + " does not match params");
        }
        std::map<GridCube, HyperplaneRecord> records;
        for (const auto& r : j.at("records")) {
            HyperplaneRecord rec;
            rec.stage = r.at("stage").get<unsigned>();
            rec.host = cube_from_json(r.at("host"));
            for (const auto& pt : r.at("rationals")) rec.rationals.push_back(RationalPoint::parse(pt.get<std::string>()));
            if (!r.at("flat").is_null()) {
                std::vector<RationalVec> dirs;
                for (const auto& v : r["flat"].at("directions")) dirs.push_back(vec_from(v));
                rec.flat = AffineFlat(vec_from(r["flat"].at("base")), dirs);
            }
            rec.starred = starred_from(r.at("starred").get<std::string>());
            if (!r.at("witness").is_null()) rec.witness = RationalPoint::parse(r["witness"].get<std::string>());
            records.emplace(rec.host, std::move(rec));
        }
        std::map<unsigned, std::set<GridCube>> enumerated;
        for (const auto& e : j.at("enumerated")) {
            const unsigned stage = e.at("stage").get<unsigned>();
            const unsigned level = e.at("level").get<unsigned>();
            auto& set = enumerated[stage];
            for (const auto& idx : e.at("removed")) {
                GridCube c{level, {}};
                for (const auto& i : idx) c.index.push_back(integer_from(i));
                set.insert(std::move(c));
            }
        }
        state->restore(std::move(records), std::move(enumerated));
        return state;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Trees

Json tree_json(const TreeBuild& build) {
    const CantorTree& t = build.tree;
    Json j;
    j["schema"] = "badapprox-tree";
    j["version"] = kTreeVersion;
    j["tool_version"] = tool_version();
    j["params"] = to_json(t.params);
    j["config"] = {{"seed_ball", format_seed_ball(t.config.seed_center, t.config.seed_radius)},
                   {"depth", t.config.depth},
                   {"epsilon", to_string(t.config.epsilon)},
                   {"policy", policy_name(t.config.policy)}};
    j["status"] = {{"complete", build.complete()},
                   {"built_layers", t.layers.empty() ? 0 : t.layers.size() - 1},
                   {"failed_layer", build.complete() ? Json(nullptr) : Json(build.failed_layer)},
                   {"error", build.complete() ? Json(nullptr) : Json(build.error_message)}};
    j["seed_cube"] = to_json(t.seed_cube);
    j["retention"] = to_string(t.retention);
    j["kappa1"] = to_string(t.kappa1);
    j["s"] = to_string(target_dimension(t.params));

    Json th = Json::array();
    for (std::size_t i = 0; i < t.thresholds.size(); ++i) {
        const auto& g = t.thresholds[i];
        th.push_back({{"layer", i + 1},
                      {"g", g.g.get_str()},
                      {"g_a", g.g_a.get_str()},
                      {"g_b", g.g_b.get_str()},
                      {"g_c", g.g_c ? Json(g.g_c->get_str()) : Json(nullptr)},
                      {"c_enforced", g.c_enforced},
                      {"c_satisfied", g.c_satisfied}});
    }
    j["thresholds"] = th;

    Json layers = Json::array();
    for (const auto& layer : t.layers) {
        Json nodes = Json::array();
        for (const auto& n : layer) {
            nodes.push_back({{"center", n.ball ? Json(n.ball->center.to_string()) : Json(nullptr)},
                             {"stage", n.ball ? n.ball->stage : 0},
                             {"parent", n.parent},
                             {"nested", to_json(n.nested)},
                             {"mass", to_string(n.mass)}});
        }
        layers.push_back(std::move(nodes));
    }
    j["layers"] = layers;

    Json covers = Json::array();
    for (const auto& c : t.covers) {
        Json kept = Json::array();
        for (const auto& b : c.kept) kept.push_back(b.center.to_string());
        covers.push_back({{"layer", c.layer},
                          {"parent", c.parent},
                          {"cube", to_json(c.cube)},
                          {"g", c.g.get_str()},
                          {"kept", kept},
                          {"rejected", c.rejected.size()},
                          {"candidates", c.candidates},
                          {"covered", to_string(c.covered)},
                          {"target", to_string(c.target)},
                          {"q_floor", c.q_floor.get_str()},
                          {"interior_ratio", to_string(c.interior_ratio)},
                          {"interior_ok", c.interior_ok}});
    }
    j["covers"] = covers;
    return j;
}

std::string deepest_csv(const CantorTree& tree) {
    std::ostringstream os;
    os << "index,stage,q";
    for (unsigned i = 1; i <= tree.params.d; ++i) os << ",x" << i;
    os << ",mass\n";
    if (tree.layers.size() < 2) return os.str();
    const auto& layer = tree.layers.back();
    for (std::size_t i = 0; i < layer.size(); ++i) {
        const auto& b = *layer[i].ball;
        os << i << ',' << b.stage << ',' << b.center.denominator().get_str();
        for (const auto& x : b.center.coords()) os << ',' << to_string(x);
        os << ',' << to_string(layer[i].mass) << '\n';
    }
    return os.str();
}

TreeFile load_tree(const Json& j) {
    expect_schema(j, "badapprox-tree", kTreeVersion);
    try {
        TreeFile f;
        f.params = params_from_json(j.at("params"));
        f.complete = j.at("status").at("complete").get<bool>();
        f.built_layers = j.at("status").at("built_layers").get<std::size_t>();
        const auto& layers = j.at("layers");
        if (layers.size() >= 2)
            for (const auto& n : layers.back()) f.deepest.push_back(RationalPoint::parse(n.at("center").get<std::string>()).coords());
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed tree file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("malformed tree file: ") + e.what());
    }
}

std::string box_count_csv(const BoxCountSeries& s, unsigned lo) {
    std::ostringstream os;
    os << "scale_num,scale_den_log,count\n";
    for (std::size_t i = 0; i < s.counts.size(); ++i) os << "1," << lo + i << ',' << s.counts[i].get_str() << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Reports

std::string status_name(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Skip: return "skip";
    }
    return "?";
}

bool ReportBundle::ok() const {
    for (const auto& c : checks)
        if (c.status == Status::Fail) return false;
    return true;
}

Json ReportBundle::to_json() const {
    Json j;
    j["schema"] = "badapprox-report";
    j["version"] = kReportVersion;
    j["tool_version"] = tool_version();
    j["command"] = command;
    j["ok"] = ok();
    j["config"] = config;
    Json cs = Json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"status", status_name(c.status)}, {"counts", c.counts}, {"detail", c.detail}});
    j["checks"] = cs;
    Json arts = Json::array();
    for (const auto& [file, hash] : artifacts) arts.push_back({{"file", file}, {"sha256", hash}});
    j["artifacts"] = arts;
    return j;
}

std::string ReportBundle::to_text() const {
    std::ostringstream os;
    os << command << " (tool " << tool_version() << "): " << (ok() ? "ok" : "FAILED") << '\n';
    for (const auto& c : checks) {
        std::string tag = status_name(c.status);
        for (auto& ch : tag) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        os << "  " << std::left << std::setw(5) << tag << ' ' << c.name;
        for (const auto& [k, v] : c.counts.items()) os << ' ' << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
        if (!c.detail.empty()) os << "  # " << c.detail;
        os << '\n';
    }
    for (const auto& [file, hash] : artifacts) os << "  sha256 " << hash << "  " << file << '\n';
    return os.str();
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(what + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const std::filesystem::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw FormatError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

}  // namespace badapprox::io
