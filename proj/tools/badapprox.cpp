// badapprox: build / verify / subset / dimension.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 rejected input,
// 3 the run itself failed (budget, unreadable file, seed or coverage failure).
// BADAPPROX_PRECISION_BITS caps the integers built by exact comparisons.

#include "badapprox/commands.hpp"
#include "badapprox/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace badapprox;

namespace {

struct Overrides {
    std::string config;
    std::optional<unsigned> d, u, depth, simplex_q;
    std::optional<std::string> tau, m, t, qcap, epsilon, seed_ball, policy, scales, out;
    std::optional<std::uint64_t> rng_seed, samples;
    std::vector<std::string> which;
    bool lazy = false;
    std::string input;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "JSON config file; flags override it");
    app->add_option("--d", o.d, "dimension");
    app->add_option("--tau", o.tau, "tau as a/b");
    app->add_option("--M", o.m, "grid base M (N = M^d)");
    app->add_option("--t", o.t, "grid scale t");
    app->add_option("--u", o.u, "schedule offset u (>= 4)");
    app->add_option("--depth", o.depth, "maxStage for build, tree depth for subset");
    app->add_option("--qcap", o.qcap, "denominator cap");
    app->add_option("--epsilon", o.epsilon, "epsilon as a/b");
    app->add_option("--seed-ball", o.seed_ball, "\"c1,...,cd;r\"");
    app->add_option("--rng-seed", o.rng_seed, "seed for randomized checks");
    app->add_option("--samples", o.samples, "sample count (0: suite default)");
    app->add_option("--out", o.out, "output directory");
}

io::RunConfig resolve(const Overrides& o) {
    io::RunConfig c;
    if (!o.config.empty()) c = io::RunConfig::from_json(io::parse_json(io::read_file(o.config), o.config));
    if (o.d) c.params.d = *o.d;
    if (o.tau) c.params.tau = parse_rational(*o.tau);
    if (o.m) c.params.m = parse_integer(*o.m);
    if (o.t) c.params.t = parse_integer(*o.t);
    if (o.u) c.params.u = *o.u;
    if (o.depth) c.depth = *o.depth;
    if (o.qcap) c.q_cap = parse_integer(*o.qcap);
    if (o.epsilon) c.epsilon = parse_rational(*o.epsilon);
    if (o.seed_ball) {
        auto [center, r] = io::parse_seed_ball(*o.seed_ball);
        c.seed_center = center;
        c.seed_radius = r;
    }
    if (o.rng_seed) c.rng_seed = *o.rng_seed;
    if (o.samples) c.samples = *o.samples;
    if (o.simplex_q) c.simplex_q = *o.simplex_q;
    if (o.policy) {
        if (*o.policy != "enforce" && *o.policy != "report") throw InvalidParams("--policy must be enforce or report");
        c.policy = *o.policy == "enforce" ? GPolicy::Enforce : GPolicy::Report;
    }
    if (o.lazy) c.lazy = true;
    if (!o.which.empty()) c.which = o.which;
    if (o.scales) c.scales = *o.scales;
    if (o.out) c.out = *o.out;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact finite-depth construction of badly approximable sets"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::tool_version());

    Overrides o;
    auto* build = app.add_subcommand("build", "resolve the pruning state and write checkpoint.json");
    add_common(build, o);
    build->add_flag("--lazy", o.lazy, "skip the exhaustive removal enumeration");

    auto* verify = app.add_subcommand("verify", "run verification suites on a checkpoint");
    add_common(verify, o);
    verify->add_option("--checkpoint", o.input, "checkpoint.json")->required();
    verify->add_option("--which", o.which, "simplex avoidance measure retention leading qapprox");
    verify->add_option("--simplex-q", o.simplex_q, "largest Q for the simplex suite");

    auto* subset = app.add_subcommand("subset", "build the Cantor subtree and its Hölder report");
    add_common(subset, o);
    subset->add_option("--checkpoint", o.input, "checkpoint.json")->required();
    subset->add_option("--policy", o.policy, "enforce or report the Hölder headroom threshold");

    auto* dimension = app.add_subcommand("dimension", "box-count the deepest layer of a tree file");
    add_common(dimension, o);
    dimension->add_option("--tree", o.input, "tree.json")->required();
    dimension->add_option("--scales", o.scales, "e.g. 2^-4..2^-12");

    CLI11_PARSE(app, argc, argv);

    try {
        const io::RunConfig cfg = resolve(o);
        io::ReportBundle rep;
        if (build->parsed()) rep = io::cmd_build(cfg);
        if (verify->parsed()) rep = io::cmd_verify(cfg, o.input);
        if (subset->parsed()) rep = io::cmd_subset(cfg, o.input);
        if (dimension->parsed()) {
            rep = io::cmd_dimension(cfg, o.input);
            const auto& c = rep.checks.front().counts;
            std::cout << "slope=" << c["slope"].get<std::string>() << " s=" << c["s"].get<std::string>() << " ("
                      << c["s_decimal"].get<std::string>() << ")\n";
        }
        std::cout << rep.to_text();
        return io::exit_status(rep);
    } catch (const InvalidParams& e) {
        std::cerr << "rejected: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "rejected: " << e.what() << '\n';
        return 2;
    } catch (const SeedFailure& e) {
        std::cerr << "seed failure: " << e.what() << " (increase depth or M)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
