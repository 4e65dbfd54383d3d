#include "badapprox/commands.hpp"

#include "badapprox/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

namespace badapprox::io {

namespace {

std::string path_in(const RunConfig& cfg, const std::string& file) {
    return (std::filesystem::path(cfg.out) / file).string();
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void emit(const RunConfig& cfg, const std::string& file, const std::string& content, ReportBundle& rep) {
    write_file(path_in(cfg, file), content);
    rep.artifacts.emplace_back(file, sha256_hex(content));
}

void write_report(const RunConfig& cfg, const ReportBundle& rep) {
    write_file(path_in(cfg, rep.command + "-report.json"), dump(rep.to_json()));
    write_file(path_in(cfg, rep.command + "-report.txt"), rep.to_text());
}

std::uint64_t need_seed(const RunConfig& cfg, const char* what) {
    if (!cfg.rng_seed) throw InvalidParams(std::string("--rng-seed is required for ") + what);
    return *cfg.rng_seed;
}

Status pass_if(bool ok) { return ok ? Status::Pass : Status::Fail; }

CheckResult check(std::string name, Status status = Status::Skip, std::string detail = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.status = status;
    c.detail = std::move(detail);
    return c;
}

// ---------------------------------------------------------------------------
// verify suites

CheckResult suite_simplex(PruningState& state, const RunConfig& cfg) {
    const std::uint64_t seed = need_seed(cfg, "the simplex suite");
    const std::uint64_t trials = cfg.samples ? cfg.samples : 1000;
    const unsigned d = state.params().d;
    CheckResult c = check("simplex");
    std::uint64_t violations = 0, vacuous = 0, total = 0;
    std::optional<SimplexTrial> first;
    for (unsigned q = 1; q <= cfg.simplex_q; ++q) {
        const auto rep = simplex_property_suite(d, q, trials, seed + q);
        violations += rep.violations.size();
        vacuous += rep.vacuous;
        total += rep.trials;
        if (!first && !rep.violations.empty()) first = rep.violations.front();
    }
    const auto control = simplex_negative_control(std::max(3u, cfg.simplex_q));
    c.counts = {{"d", d}, {"q_max", cfg.simplex_q}, {"boxes", total}, {"vacuous", vacuous},
                {"violations", violations}, {"control_violations", control.violations.size()}};
    c.status = pass_if(violations == 0 && !control.violations.empty());
    if (first) {
        c.detail = "first violation: box";
        for (std::size_t i = 0; i < first->box.dim(); ++i)
            c.detail += " [" + to_string(first->box.lo[i]) + "," + to_string(first->box.hi[i]) + "]";
        c.detail += " holds " + std::to_string(first->points) + " points spanning dimension " +
                    std::to_string(first->hull_dim);
    }
    return c;
}

CheckResult suite_avoidance(PruningState& state, const RunConfig& cfg) {
    const unsigned n = state.max_stage();
    const Integer cap = cfg.q_cap ? *cfg.q_cap : Integer(state.params().n_pow(n) - 1);
    const auto rep = check_dangerous_avoidance(state, n, cap);
    CheckResult c = check("avoidance");
    c.counts = {{"stage", n}, {"qcap", cap.get_str()}, {"rationals", rep.rationals_checked},
                {"violations", rep.violations.size()}};
    c.status = pass_if(rep.ok());
    if (!rep.ok()) c.detail = "first: " + rep.violations.front().point.to_string() + " meets " + rep.violations.front().cube.to_string();
    return c;
}

std::vector<CheckResult> suite_measure(PruningState& state) {
    std::vector<CheckResult> out;
    for (unsigned n = 1; n <= state.max_stage(); ++n) {
        CheckResult c = check("measure.stage" + std::to_string(n));
        MeasureReport rep;
        // the exact count scans survivors; skip it when the level alone is over budget
        const Integer cubes = pow(state.grid().cells_per_axis(state.level(n)), state.params().d);
        if (cubes > Integer(static_cast<unsigned long>(state.budget()))) {
            rep = surviving_measure(state, n, false);
            c.detail = "exact value skipped: level " + std::to_string(state.level(n)) + " has " + cubes.get_str() +
                       " cubes (budget " + std::to_string(state.budget()) + ")";
        } else {
            try {
                rep = surviving_measure(state, n, true);
            } catch (const BudgetExceeded& e) {
                rep = surviving_measure(state, n, false);
                c.detail = std::string("exact value skipped: ") + e.what();
            }
        }
        c.counts = {{"exact", rep.exact ? Json(to_string(*rep.exact)) : Json(nullptr)},
                    {"bound", to_string(rep.bound)},
                    {"closed_form_bound", to_string(rep.closed_form_bound)}};
        c.status = pass_if(rep.consistent());
        out.push_back(std::move(c));
    }
    return out;
}

CheckResult suite_retention(PruningState& state) {
    CheckResult c = check("retention");
    if (state.max_stage() < 2) {
        c.detail = "needs maxStage >= 2";
        return c;
    }
    std::uint64_t cubes = 0, failures = 0;
    std::optional<Rational> worst;
    Rational bound;
    state.for_each_survivor(1, [&](const GridCube& cube) {
        const auto rep = check_cube_retention(state, cube, 1, 2);
        ++cubes;
        if (!rep.ok()) ++failures;
        if (!worst || rep.ratio < *worst) worst = rep.ratio;
        bound = rep.bound;
    });
    c.counts = {{"m", 1}, {"n", 2}, {"cubes", cubes}, {"failures", failures},
                {"min_ratio", worst ? Json(to_string(*worst)) : Json(nullptr)}, {"bound", to_string(bound)}};
    c.status = pass_if(failures == 0);
    return c;
}

CheckResult suite_leading(PruningState& state) {
    const unsigned n = state.max_stage();
    const auto lead = leading_rationals(state, n);
    std::set<GridCube> hosts;
    for (const auto& l : lead) hosts.insert(l.host);
    std::uint64_t starred = 0, orphans = 0;
    for (const auto& [host, rec] : state.records_snapshot()) {
        if (rec.stage > n || rec.starred != Starred::Yes) continue;
        ++starred;
        if (!hosts.count(host)) ++orphans;
    }
    CheckResult c = check("leading");
    c.counts = {{"stage", n}, {"leading", lead.size()}, {"starred_hosts", starred}, {"hosts_without_leading", orphans}};
    c.status = pass_if(orphans == 0);
    return c;
}

CheckResult suite_qapprox(PruningState& state, const RunConfig& cfg) {
    const std::uint64_t seed = need_seed(cfg, "the qapprox suite");
    const std::uint64_t samples = cfg.samples ? cfg.samples : 100;
    const unsigned n = state.max_stage();
    const auto rep = check_q_approx(state, n, samples, seed);
    CheckResult c = check("qapprox");
    c.counts = {{"stage", n}, {"samples", rep.samples.size()}, {"passed", rep.passed}};
    c.status = pass_if(!rep.samples.empty() && rep.passed == rep.samples.size());
    if (c.status == Status::Fail) c.detail = "truncated check; the approximation lemma is asymptotic";
    return c;
}

const std::vector<std::string> kSuites = {"simplex", "avoidance", "measure", "retention", "leading", "qapprox"};

}  // namespace

int exit_status(const ReportBundle& r) { return r.ok() ? 0 : 1; }

ReportBundle cmd_build(const RunConfig& cfg) {
    ConstructionParams p = cfg.params;
    p.max_stage = cfg.depth;
    p.validate();
    PruningState state(p);
    if (!cfg.lazy) resolve_all_stages(state);
    const std::string text = dump(checkpoint_json(state));

    ReportBundle rep;
    rep.command = "build";
    rep.config = cfg.to_json();
    CheckResult c = check("checkpoint", Status::Pass);
    c.counts = {{"stages", p.max_stage}, {"records", state.records_snapshot().size()}};
    for (const auto& [stage, removed] : state.enumerated_removals())
        c.counts["removed_stage" + std::to_string(stage)] = removed.size();
    if (cfg.lazy) c.detail = "lazy: removals not enumerated";
    rep.checks.push_back(std::move(c));
    emit(cfg, "checkpoint.json", text, rep);
    write_report(cfg, rep);
    return rep;
}

ReportBundle cmd_verify(const RunConfig& cfg, const std::string& checkpoint_path) {
    const std::string text = read_file(checkpoint_path);
    auto state = load_checkpoint(parse_json(text, checkpoint_path));
    std::vector<std::string> which = cfg.which.empty() ? kSuites : cfg.which;
    for (const auto& w : which)
        if (std::find(kSuites.begin(), kSuites.end(), w) == kSuites.end())
            throw InvalidParams("unknown suite \"" + w + "\"");
    if (cfg.q_cap && *cfg.q_cap >= state->params().n_pow(state->max_stage()))
        throw InvalidParams("qCap must be < N^n");

    ReportBundle rep;
    rep.command = "verify";
    rep.config = cfg.to_json();
    rep.artifacts.emplace_back(std::filesystem::path(checkpoint_path).filename().string(), sha256_hex(text));
    for (const auto& w : kSuites) {
        if (std::find(which.begin(), which.end(), w) == which.end()) continue;
        try {
            if (w == "simplex") rep.checks.push_back(suite_simplex(*state, cfg));
            if (w == "avoidance") rep.checks.push_back(suite_avoidance(*state, cfg));
            if (w == "measure")
                for (auto& c : suite_measure(*state)) rep.checks.push_back(std::move(c));
            if (w == "retention") rep.checks.push_back(suite_retention(*state));
            if (w == "leading") rep.checks.push_back(suite_leading(*state));
            if (w == "qapprox") rep.checks.push_back(suite_qapprox(*state, cfg));
        } catch (const BudgetExceeded& e) {
            rep.checks.push_back(check(w, Status::Skip, std::string("budget exceeded: ") + e.what()));
        } catch (const ComparisonBudgetExceeded& e) {
            rep.checks.push_back(check(w, Status::Skip, std::string("precision budget exceeded: ") + e.what()));
        }
    }
    write_report(cfg, rep);
    return rep;
}

ReportBundle cmd_subset(const RunConfig& cfg, const std::string& checkpoint_path) {
    if (!cfg.seed_center || !cfg.seed_radius) throw InvalidParams("--seed-ball is required");
    const std::string text = read_file(checkpoint_path);
    auto state = load_checkpoint(parse_json(text, checkpoint_path));
    const unsigned d = state->params().d;
    const RationalVec& c0 = *cfg.seed_center;
    const Rational& r0 = *cfg.seed_radius;
    if (c0.size() != d) throw InvalidParams("seed ball center needs " + std::to_string(d) + " coordinates");
    if (r0 <= 0) throw InvalidParams("seed ball radius must be positive");
    for (const auto& x : c0)
        if (x - r0 < 0 || x + r0 > 1) throw InvalidParams("seed ball must lie inside [0,1]^d");
    const std::uint64_t seed = need_seed(cfg, "subset (sampled Hölder check)");

    TreeConfig tc;
    tc.seed_center = c0;
    tc.seed_radius = r0;
    tc.depth = cfg.depth;
    tc.epsilon = cfg.epsilon;
    tc.policy = cfg.policy;
    const TreeBuild build = build_tree_partial(*state, tc);
    const CantorTree& tree = build.tree;

    ReportBundle rep;
    rep.command = "subset";
    rep.config = cfg.to_json();
    rep.artifacts.emplace_back(std::filesystem::path(checkpoint_path).filename().string(), sha256_hex(text));

    CheckResult b = check("tree.build", pass_if(build.complete()));
    b.counts = {{"depth", tc.depth}, {"built_layers", tree.layers.size() - 1}};
    for (std::size_t i = 1; i < tree.layers.size(); ++i) b.counts["layer" + std::to_string(i)] = tree.layers[i].size();
    if (!build.complete()) b.detail = "layer " + std::to_string(build.failed_layer) + ": " + build.error_message;
    rep.checks.push_back(std::move(b));

    const TreeCheck tcheck = verify_tree(*state, tree);
    CheckResult v = check("tree.verify", pass_if(tcheck.ok()));
    v.counts = {{"covers", tree.covers.size()}, {"failures", tcheck.failures.size()}};
    if (!tcheck.ok()) v.detail = tcheck.failures.front();
    rep.checks.push_back(std::move(v));

    const HolderReport h = check_holder(tree, cfg.samples ? cfg.samples : 500, seed);
    CheckResult hn = check("holder.nodes", pass_if(h.node_violations.empty()));
    hn.counts = {{"exponent", to_string(h.exponent)}, {"K", to_string(h.k)}, {"nodes", h.nodes_checked},
                 {"violations", h.node_violations.size()}};
    rep.checks.push_back(std::move(hn));
    CheckResult hs = check("holder.samples", pass_if(h.sample_violations.empty()));
    hs.counts = {{"K_prime", to_string(h.k_prime)}, {"samples", h.samples_checked},
                 {"violations", h.sample_violations.size()}};
    if (!h.sample_violations.empty()) hs.detail = h.sample_violations.front().what;
    rep.checks.push_back(std::move(hs));

    CheckResult cert = check("certificate");
    if (build.complete() && h.ok()) {
        const Certificate ct = dimension_certificate(tree, h);
        cert.status = Status::Pass;
        cert.counts = {{"s", to_string(ct.s)}, {"epsilon", to_string(tc.epsilon)},
                       {"lower_bound", to_string(ct.lower_bound)}};
    } else {
        cert.status = Status::Fail;
        cert.counts = {{"s", to_string(target_dimension(state->params()))}, {"epsilon", to_string(tc.epsilon)}};
        cert.detail = build.complete() ? "refused: Hölder bound violated" : "refused: tree incomplete";
    }
    rep.checks.push_back(std::move(cert));

    emit(cfg, "tree.json", dump(tree_json(build)), rep);
    emit(cfg, "deepest.csv", deepest_csv(tree), rep);
    write_report(cfg, rep);
    return rep;
}

ReportBundle cmd_dimension(const RunConfig& cfg, const std::string& tree_path) {
    const std::string text = read_file(tree_path);
    const TreeFile tree = load_tree(parse_json(text, tree_path));
    const auto [lo, hi] = parse_scale_spec(cfg.scales);
    if (tree.deepest.empty()) throw InvalidParams("tree file has no built layer");
    const BoxCountSeries s = box_count(tree.deepest, dyadic_scales(lo, hi));
    const Rational target = target_dimension(tree.params);

    ReportBundle rep;
    rep.command = "dimension";
    rep.config = cfg.to_json();
    rep.artifacts.emplace_back(std::filesystem::path(tree_path).filename().string(), sha256_hex(text));
    CheckResult c = check("dimension.slope");
    const double sd = target.get_d();
    c.status = pass_if(!s.degenerate && s.slope >= sd - 0.25 && s.slope <= sd + 0.25);
    c.counts = {{"points", tree.deepest.size()}, {"scales", s.counts.size()}, {"slope", fixed(s.slope)},
                {"s", to_string(target)}, {"s_decimal", fixed(sd)}, {"degenerate", s.degenerate},
                {"monotone", s.monotone}, {"tree_complete", tree.complete}};
    c.detail = "diagnostic; band s +/- 0.25";
    rep.checks.push_back(std::move(c));
    emit(cfg, "boxcount.csv", box_count_csv(s, lo), rep);
    write_report(cfg, rep);
    return rep;
}

}  // namespace badapprox::io
