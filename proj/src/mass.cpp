#include "badapprox/mass.hpp"

#include "badapprox/enumerate.hpp"
#include "badapprox/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace badapprox {

namespace {

constexpr unsigned kRetentionStages = 64;
// log2 of the largest Hölder-headroom threshold we try to pin down exactly.
constexpr double kHeadroomLog2Cap = 4096;

void ensure_stage(PruningState& state, unsigned k) {
    if (k > state.max_stage()) state.deepen(k);
}

PowerRadius power_of(const Rational& coeff, const Integer& base, const Rational& exp) {
    if (base == 1 || exp == 0) return PowerRadius(coeff);
    return PowerRadius(coeff, base, exp);
}

/// Smallest integer strictly above x^{1/k}.
Integer root_above(const Integer& x, unsigned long k) {
    Integer r;
    mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
    return r + 1;
}

Integer ipow(const Integer& b, unsigned long e) { return badapprox::pow(b, e); }

/// Half the side of a level-`level` cube as a product of integer powers.
PowerRadius half_side(const Grid& grid, unsigned level) {
    const Rational e = -Rational(static_cast<long>(level) * (grid.d() + 1));
    return PowerRadius(Rational(1, 2)) * power_of(1, grid.t(), -1) * power_of(1, grid.m(), e);
}

Grid tree_grid(const CantorTree& t) { return Grid(t.params.d, t.params.t, t.params.m); }

unsigned stage_of(const PruningState& state, const GridCube& cube) {
    auto m = state.stage_of_level(cube.level);
    if (!m) throw InvalidParams("cube level " + std::to_string(cube.level) + " is not a pruning level");
    return *m;
}

}  // namespace

PowerRadius ApproxBall::fat_radius() const {
    const unsigned d = static_cast<unsigned>(center.dim());
    return power_of(2, center.denominator(), -Rational(d + 1, d));
}

PowerRadius ApproxBall::shrunk_radius(const Rational& tau) const {
    return power_of(1, center.denominator(), -(1 + tau));
}

Rational ApproxBall::fat_volume() const {
    const unsigned d = static_cast<unsigned>(center.dim());
    Rational v(ipow(4, d), ipow(center.denominator(), d + 1));
    v.canonicalize();
    return v;
}

PowerRadius ApproxBall::shrunk_volume(const Rational& tau) const {
    const unsigned d = static_cast<unsigned>(center.dim());
    Rational e = -Rational(d) * (1 + tau);
    e.canonicalize();
    return power_of(ipow(2, d), center.denominator(), e);
}

Rational retention_constant(const ConstructionParams& p) { return closed_form_measure_bound(p, kRetentionStages); }

Rational kappa_one(const ConstructionParams& p) {
    Rational k = retention_constant(p) / (4 * Rational(ipow(5, p.d)));
    k.canonicalize();
    return k;
}

PowerRadius volume_constant(const ConstructionParams& p) {
    Rational e = Rational(p.d * p.d * (p.u - 1)) * (1 + p.tau);
    e.canonicalize();
    return power_of(ipow(2, p.d) * ipow(p.t, p.d), p.m, e);
}

std::vector<GridCube> interior_subcubes(PruningState& state, const GridCube& cube) {
    const unsigned m = stage_of(state, cube);
    ensure_stage(state, m + 1);
    std::vector<GridCube> out;
    state.for_each_survivor_in(cube, m + 1, [&](const GridCube& c) {
        if (!state.grid().touches_boundary_of(c, cube)) out.push_back(c);
    });
    return out;
}

CoverEstimate cover_estimate(const Grid& grid, const GridCube& cube, const std::optional<RationalPoint>& anchor,
                             const Integer& g, const Rational& kappa1) {
    const unsigned d = grid.d();
    CoverEstimate est;
    est.q_floor = g < 2 ? Integer(2) : g;
    const Box box = grid.closed_box(cube);
    if (anchor && anchor->denominator() < est.q_floor) {
        const RationalVec a = anchor->coords();
        Rational far = 0;
        for (unsigned i = 0; i < d; ++i) far = std::max(far, Rational(std::max(abs(a[i] - box.lo[i]), abs(a[i] - box.hi[i]))));
        const Integer repel = ceil(1 / (anchor->denominator() * far));
        est.q_floor = std::max(est.q_floor, repel);
    }
    const Rational need = kappa1 * box.volume() * Rational(ipow(est.q_floor, d + 1)) / Rational(ipow(4, d));
    est.min_balls = ceil(need);
    return est;
}

CoverRecord t_gi_cover(PruningState& state, const GridCube& cube, const Integer& g, const Rational& kappa1,
                       const TreeConfig& cfg, const std::optional<RationalPoint>& anchor) {
    const ConstructionParams& p = state.params();
    const Grid& grid = state.grid();
    if (!state.survives(cube)) throw NestingFailure("cover requested for removed cube " + cube.to_string());

    CoverRecord rec;
    rec.cube = cube;
    rec.g = g;
    rec.target = kappa1 * grid.volume(cube.level);
    rec.target.canonicalize();

    const CoverEstimate est = cover_estimate(grid, cube, anchor, g, kappa1);
    rec.q_floor = est.q_floor;
    if (est.min_balls > Integer(std::to_string(cfg.ball_budget)))
        throw BudgetExceeded("cover of " + cube.to_string() + " needs at least " + est.min_balls.get_str() +
                             " balls (its fractions have q >= " + est.q_floor.get_str() + "); ball budget " +
                             std::to_string(cfg.ball_budget));

    const auto interior = interior_subcubes(state, cube);
    {
        const unsigned m = stage_of(state, cube);
        rec.interior_ratio = Rational(static_cast<long>(interior.size())) * grid.volume(state.level(m + 1)) /
                             grid.volume(cube.level);
        rec.interior_ratio.canonicalize();
        rec.interior_ok = rec.interior_ratio >= retention_constant(p) / 2;
    }
    std::vector<Box> interior_boxes;
    for (const auto& c : interior) interior_boxes.push_back(grid.closed_box(c));

    const Box box = grid.closed_box(cube);
    std::vector<PowerRadius> kept_fat;
    std::vector<RationalVec> kept_coords;
    std::multimap<Rational, std::size_t> by_x;
    Rational max_fat = 0;
    // Windows [lo, hi) sized to hold about window_chunk fractions: count ~ lambda(I) (d+1) lo^d (hi - lo).
    const Integer q_stop = est.q_floor * ipow(2, cfg.max_doublings);
    const Rational vol = box.volume();
    Integer lo = est.q_floor;
    while (lo < q_stop && rec.covered < rec.target) {
        Integer step = ceil(Rational(Integer(std::to_string(cfg.window_chunk))) /
                            (vol * (p.d + 1) * Rational(ipow(lo, p.d))));
        step = std::clamp(step, Integer(1), lo);
        const Integer hi = lo + step;
        for (const auto& r : enumerate_rationals(box, lo, hi, BoxMode::HalfOpen)) {
            ApproxBall ball{r, band_of(p, r.denominator())};
            const RationalVec c = r.coords();
            const PowerRadius fat = ball.fat_radius();
            if (!ball_inside_box(c, fat, box)) continue;
            const bool meets = std::any_of(interior_boxes.begin(), interior_boxes.end(),
                                           [&](const Box& b) { return ball_meets_box(c, fat, b); });
            if (!meets) continue;
            ensure_stage(state, ball.stage);
            if (!leading_of(state, r)) continue;
            ++rec.candidates;

            // Kept balls are indexed by first coordinate; only those within r + r_max can meet this one.
            std::optional<std::size_t> met;
            const Rational reach = fat.upper_bound() + max_fat;
            for (auto it = by_x.lower_bound(c[0] - reach); it != by_x.end() && it->first <= c[0] + reach; ++it) {
                const std::size_t i = it->second;
                if (met && *met < i) continue;
                if (cmp_sum(sup_dist(c, kept_coords[i]), {fat, kept_fat[i]}) < 0) met = i;
            }
            if (met) {
                rec.rejected.push_back({r, *met});
                continue;
            }
            rec.kept.push_back(ball);
            kept_fat.push_back(fat);
            kept_coords.push_back(c);
            by_x.emplace(c[0], rec.kept.size() - 1);
            max_fat = std::max(max_fat, fat.upper_bound());
            rec.covered += ball.fat_volume();
            if (rec.covered >= rec.target) break;
        }
        lo = hi;
    }
    rec.covered.canonicalize();
    if (rec.covered < rec.target) {
        const Rational ratio = rec.covered / rec.target;
        throw CoverageShortfall(g.get_str(), ratio.get_d(),
                                "after q < " + lo.get_str() + " in " + cube.to_string() +
                                    "; increase M or lower epsilon");
    }
    return rec;
}

GridCube nest_cube(PruningState& state, const ApproxBall& ball) {
    const ConstructionParams& p = state.params();
    const Grid& grid = state.grid();
    ensure_stage(state, ball.stage);
    const RationalVec c = ball.center.coords();
    auto cube = state.first_survivor_meeting(c, state.schedule(ball.stage).delta, ball.stage - 1);
    if (!cube)
        throw NestingFailure("no surviving cube meets the delta-ball of " + ball.center.to_string() +
                             " (not a leading rational)");
    if (!box_inside_ball(grid.closed_box(*cube), c, ball.shrunk_radius(p.tau)))
        throw NestingFailure("nested cube " + cube->to_string() + " leaves the shrunk ball of " +
                             ball.center.to_string());
    const PowerRadius bound = volume_constant(p) * grid.volume(cube->level);
    if (cmp_power(ball.shrunk_volume(p.tau), bound) > 0)
        throw NestingFailure("volume ratio above C at " + ball.center.to_string());
    return *cube;
}

GChoice choose_G(PruningState& state, const CantorTree& tree, std::size_t layer, GPolicy policy) {
    const ConstructionParams& p = state.params();
    const Grid& grid = state.grid();
    if (layer == 0 || layer > tree.layers.size()) throw InvalidParams("choose_G: layer has no parent layer");
    const auto& parents = tree.layers[layer - 1];

    GChoice gc;
    gc.c_enforced = policy == GPolicy::Enforce;

    // (a) 2 q^{-(d+1)/d} < side/2  <=>  q^{d+1} > (4/side)^d.
    gc.g_a = 2;
    for (const auto& node : parents) {
        const unsigned m = stage_of(state, node.nested);
        ensure_stage(state, m + 1);
        const Rational inv = 4 / grid.side(state.level(m + 1));
        const Integer x = ipow(floor(inv), p.d);
        if (inv.get_den() != 1) throw InvalidParams("choose_G: non-integral inverse side");
        gc.g_a = std::max(gc.g_a, root_above(x, p.d + 1));
    }

    // (b) 4 q^{-(1+tau)} < 2 q^{-(d+1)/d}  <=>  q^{ad-b} > 2^{bd}, tau = a/b.
    {
        const Integer a = p.tau.get_num(), b = p.tau.get_den();
        const Integer e = a * p.d - b;
        gc.g_b = root_above(ipow(2, b.get_ui() * p.d), e.get_ui());
    }

    // (c) q^{(1+tau) eps} > max mass / lambda(shrunk ball of the parent); the root counts as 1.
    {
        PowerRadius worst(1);
        for (const auto& node : parents) {
            if (!node.ball) continue;
            PowerRadius r = PowerRadius(node.mass) / node.ball->shrunk_volume(p.tau);
            if (cmp_power(r, worst) > 0) worst = r;
        }
        Rational e = (1 + p.tau) * tree.config.epsilon;
        e.canonicalize();
        const double est = worst.log2_estimate() / e.get_d();
        gc.c_log2_estimate = est;
        if (est <= kHeadroomLog2Cap) {
            auto above = [&](const Integer& q) { return q >= 2 && cmp_power(power_of(1, q, e), worst) > 0; };
            Integer lo = 1;  // not above (or trivially small)
            Integer hi = ipow(2, static_cast<unsigned long>(std::max(1.0, std::ceil(est) + 2)));
            if (cmp_power(Rational(1), worst) > 0) {
                hi = 2;
            } else {
                while (!above(hi)) hi *= 2;
                while (hi - lo > 1) {
                    Integer mid = (lo + hi) / 2;
                    if (above(mid))
                        hi = mid;
                    else
                        lo = mid;
                }
            }
            gc.g_c = hi;
        }
    }

    gc.g = std::max(gc.g_a, gc.g_b);
    if (!tree.thresholds.empty() && layer >= 2) gc.g = std::max(gc.g, Integer(tree.thresholds[layer - 2].g + 1));
    if (policy == GPolicy::Enforce) {
        if (!gc.g_c)
            throw BudgetExceeded("Hölder headroom needs G around 2^" + std::to_string(static_cast<long>(gc.c_log2_estimate)));
        gc.g = std::max(gc.g, *gc.g_c);
    }
    gc.c_satisfied = gc.g_c && gc.g >= *gc.g_c;
    return gc;
}

namespace {

void build_layer(PruningState& state, CantorTree& tree, unsigned n) {
    const TreeConfig& cfg = tree.config;
    const Grid& grid = state.grid();
    GChoice gc = choose_G(state, tree, n, cfg.policy);
    const auto& parents = tree.layers[n - 1];
    auto anchor_of = [&](const CantorNode& node) {
        return node.ball ? std::optional<RationalPoint>(node.ball->center) : std::nullopt;
    };

    Integer least = 0;
    for (const auto& par : parents) least += cover_estimate(grid, par.nested, anchor_of(par), gc.g, tree.kappa1).min_balls;
    if (least > Integer(std::to_string(cfg.node_budget)))
        throw BudgetExceeded("layer " + std::to_string(n) + " needs at least " + least.get_str() +
                             " balls; node budget " + std::to_string(cfg.node_budget));

    std::vector<CantorNode> next;
    std::vector<CoverRecord> covers;
    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
        CoverRecord rec = t_gi_cover(state, parents[pi].nested, gc.g, tree.kappa1, cfg, anchor_of(parents[pi]));
        rec.layer = n;
        rec.parent = pi;
        for (const auto& ball : rec.kept) {
            Rational mass = parents[pi].mass * ball.fat_volume() / rec.covered;
            mass.canonicalize();
            next.push_back(CantorNode{ball, static_cast<int>(pi), nest_cube(state, ball), mass});
        }
        covers.push_back(std::move(rec));
    }
    tree.thresholds.push_back(std::move(gc));
    for (auto& c : covers) tree.covers.push_back(std::move(c));
    tree.layers.push_back(std::move(next));
}

}  // namespace

TreeBuild build_tree_partial(PruningState& state, const TreeConfig& cfg) {
    const ConstructionParams& p = state.params();
    const Grid& grid = state.grid();
    if (cfg.seed_center.size() != p.d) throw DimensionMismatch(cfg.seed_center.size(), p.d);
    if (cfg.seed_radius <= 0) throw InvalidParams("seed radius must be positive");
    if (cfg.epsilon <= 0 || cfg.epsilon >= target_dimension(p)) throw InvalidParams("epsilon must lie in (0, s)");
    for (const auto& x : cfg.seed_center)
        if (x - cfg.seed_radius < 0 || x + cfg.seed_radius > 1)
            throw InvalidParams("seed ball must lie in [0,1]^d");

    CantorTree tree;
    tree.params = p;
    tree.config = cfg;
    tree.retention = retention_constant(p);
    tree.kappa1 = kappa_one(p);

    const Rational eps_n = 1 - tree.retention;
    const Rational ball_volume = pow(2 * cfg.seed_radius, static_cast<long>(p.d));
    if (!(eps_n < ball_volume / 4))
        throw SeedFailure("eps_N = " + to_string(eps_n) + " is not below lambda(B)/4; increase M");

    // I_0: lexicographically first surviving level-l(1) cube inside the seed ball.
    ensure_stage(state, 1);
    const unsigned lvl = state.level(1);
    const Rational cells(grid.cells_per_axis(lvl));
    IndexVec lo(p.d), hi(p.d);
    for (unsigned i = 0; i < p.d; ++i) {
        lo[i] = ceil((cfg.seed_center[i] - cfg.seed_radius) * cells);
        hi[i] = floor((cfg.seed_center[i] + cfg.seed_radius) * cells) - 1;
        if (hi[i] < lo[i]) throw SeedFailure("seed ball holds no level-" + std::to_string(lvl) + " cube; increase M");
    }
    const PowerRadius seed_r(cfg.seed_radius);
    std::optional<GridCube> first;
    IndexVec idx = lo;
    for (;;) {
        GridCube c{lvl, idx};
        if (box_inside_ball(grid.closed_box(c), cfg.seed_center, seed_r) && state.survives(c)) {
            first = c;
            break;
        }
        std::size_t i = p.d;
        while (i > 0 && idx[i - 1] == hi[i - 1]) {
            idx[i - 1] = lo[i - 1];
            --i;
        }
        if (i == 0) break;
        ++idx[i - 1];
    }
    if (!first) throw SeedFailure("no surviving level-" + std::to_string(lvl) + " cube lies inside the seed ball");
    tree.seed_cube = *first;
    tree.layers.push_back({CantorNode{std::nullopt, -1, *first, Rational(1)}});

    TreeBuild out;
    for (unsigned n = 1; n <= cfg.depth; ++n) {
        try {
            build_layer(state, tree, n);
        } catch (const Error& e) {
            out.error = std::current_exception();
            out.error_message = e.what();
            out.failed_layer = n;
            break;
        }
    }
    out.tree = std::move(tree);
    return out;
}

CantorTree build_tree(PruningState& state, const TreeConfig& cfg) {
    TreeBuild b = build_tree_partial(state, cfg);
    if (b.error) std::rethrow_exception(b.error);
    return std::move(b.tree);
}

Rational mass_upper(const CantorTree& tree, const ProbeBall& f) {
    Rational total = 0;
    const auto& deepest = tree.layers.back();
    for (const auto& node : deepest) {
        if (!node.ball) {
            // depth 0: the root's region is I_0
            if (dist_point_box(f.center, tree_grid(tree).closed_box(node.nested)) < f.radius) total += node.mass;
            continue;
        }
        const Rational gap = sup_dist(f.center, node.ball->center.coords()) - f.radius;
        if (gap < 0 || less(gap, node.ball->shrunk_radius(tree.params.tau))) total += node.mass;
    }
    return total;
}

HolderReport check_holder(const CantorTree& tree, std::uint64_t samples, std::uint64_t rng_seed) {
    const ConstructionParams& p = tree.params;
    const Grid grid = tree_grid(tree);
    HolderReport rep;
    rep.exponent = target_dimension(p) - tree.config.epsilon;
    rep.exponent.canonicalize();

    const Rational four_d(ipow(4, p.d));
    const PowerRadius c = volume_constant(p);
    const Rational k_case1 = four_d / (tree.kappa1 * grid.volume(tree.seed_cube.level));
    const PowerRadius k_case2 = PowerRadius(four_d / tree.kappa1) / c;
    rep.k = cmp_power(k_case1, k_case2) >= 0 ? PowerRadius(k_case1) : k_case2;
    rep.k_prime = PowerRadius(Rational(ipow(10, p.d)) / tree.kappa1) / c;

    auto check = [&](std::vector<HolderViolation>& out, const std::string& what, const Rational& mass,
                     const PowerRadius& bound_factor, const PowerRadius& r) {
        const PowerRadius bound = bound_factor * r.pow(rep.exponent);
        if (cmp_power(mass, bound) > 0) out.push_back({what, mass, r.log2_estimate()});
    };

    for (std::size_t n = 0; n < tree.layers.size(); ++n) {
        for (std::size_t i = 0; i < tree.layers[n].size(); ++i) {
            const CantorNode& node = tree.layers[n][i];
            const PowerRadius r = node.ball ? node.ball->shrunk_radius(p.tau) : half_side(grid, node.nested.level);
            check(rep.node_violations, "node " + std::to_string(n) + "/" + std::to_string(i), node.mass, rep.k, r);
            ++rep.nodes_checked;
        }
    }

    const auto& deepest = tree.layers.back();
    if (deepest.empty() || !deepest.front().ball) return rep;
    double smallest = 0;
    for (const auto& node : deepest)
        smallest = std::min(smallest, node.ball->shrunk_radius(p.tau).log2_estimate());
    const long j_max = std::max(2L, static_cast<long>(std::ceil(-smallest)));

    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<std::size_t> pick(0, deepest.size() - 1);
    std::uniform_int_distribution<long> scale(2, j_max);
    std::uniform_int_distribution<long> offset(-1024, 1024);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const CantorNode& node = deepest[pick(rng)];
        const long j = scale(rng);
        ProbeBall f;
        f.radius = Rational(1, ipow(2, static_cast<unsigned long>(j)));
        f.center = node.ball->center.coords();
        for (auto& x : f.center) {
            x += Rational(offset(rng), 1024) * f.radius;
            x.canonicalize();
        }
        check(rep.sample_violations, "sample " + std::to_string(s), mass_upper(tree, f), rep.k_prime,
              PowerRadius(1, 2, Rational(-j)));
        ++rep.samples_checked;
    }
    return rep;
}

Certificate dimension_certificate(const CantorTree& tree, const HolderReport& report) {
    if (!report.ok())
        throw Error("dimension certificate refused: " + std::to_string(report.node_violations.size()) +
                    " node and " + std::to_string(report.sample_violations.size()) + " sampled Hölder violations");
    Certificate cert;
    cert.s = target_dimension(tree.params);
    cert.lower_bound = cert.s - tree.config.epsilon;
    cert.lower_bound.canonicalize();
    return cert;
}

TreeCheck verify_tree(PruningState& state, const CantorTree& tree) {
    const ConstructionParams& p = state.params();
    const Grid& grid = state.grid();
    TreeCheck out;
    auto fail = [&](std::string msg) { out.failures.push_back(std::move(msg)); };

    for (const auto& rec : tree.covers) {
        const std::string where = "cover " + std::to_string(rec.layer) + "/" + std::to_string(rec.parent) + ": ";
        const Box box = grid.closed_box(rec.cube);
        Rational sum = 0;
        for (std::size_t i = 0; i < rec.kept.size(); ++i) {
            const ApproxBall& b = rec.kept[i];
            const RationalVec c = b.center.coords();
            sum += b.fat_volume();
            if (b.center.denominator() < rec.g) fail(where + "q below G");
            if (!ball_inside_box(c, b.fat_radius(), box)) fail(where + "fat ball leaves I");
            if (!leading_of(state, b.center)) fail(where + b.center.to_string() + " is not leading");
            for (std::size_t j = i + 1; j < rec.kept.size(); ++j)
                if (cmp_sum(sup_dist(c, rec.kept[j].center.coords()), {b.fat_radius(), rec.kept[j].fat_radius()}) < 0)
                    fail(where + "kept balls " + std::to_string(i) + "," + std::to_string(j) + " overlap");
        }
        sum.canonicalize();
        if (sum != rec.covered) fail(where + "coverage sum mismatch");
        Rational target = tree.kappa1 * grid.volume(rec.cube.level);
        target.canonicalize();
        if (target != rec.target) fail(where + "target mismatch");
        if (rec.covered < target) fail(where + "coverage below kappa_1 lambda(I)");
        for (const auto& rj : rec.rejected) {
            if (rj.met >= rec.kept.size()) {
                fail(where + "rejected candidate points past kept list");
                continue;
            }
            const ApproxBall& k = rec.kept[rj.met];
            const ApproxBall cand{rj.center, band_of(p, rj.center.denominator())};
            const Rational dist = sup_dist(rj.center.coords(), k.center.coords());
            if (cmp_sum(dist, {k.fat_radius() * Rational(5), cand.fat_radius()}) >= 0)
                fail(where + rj.center.to_string() + " misses the 5r blow-up");
        }
    }

    Rational total_root = 0;
    for (const auto& n : tree.layers.front()) total_root += n.mass;
    if (total_root != 1) fail("root mass is not 1");
    for (std::size_t n = 1; n < tree.layers.size(); ++n) {
        const auto& layer = tree.layers[n];
        const auto& parents = tree.layers[n - 1];
        std::vector<Rational> child_mass(parents.size());
        Rational total = 0;
        for (std::size_t i = 0; i < layer.size(); ++i) {
            const CantorNode& node = layer[i];
            const std::string where = "node " + std::to_string(n) + "/" + std::to_string(i) + ": ";
            if (!node.ball || node.parent < 0 || static_cast<std::size_t>(node.parent) >= parents.size()) {
                fail(where + "malformed");
                continue;
            }
            const CantorNode& par = parents[node.parent];
            child_mass[node.parent] += node.mass;
            total += node.mass;
            const RationalVec c = node.ball->center.coords();
            if (!ball_inside_box(c, node.ball->fat_radius(), grid.closed_box(par.nested)))
                fail(where + "ball leaves parent's nested cube");
            if (!box_inside_ball(grid.closed_box(node.nested), c, node.ball->shrunk_radius(p.tau)))
                fail(where + "nested cube leaves shrunk ball");
            if (cmp_power(node.ball->shrunk_volume(p.tau), volume_constant(p) * grid.volume(node.nested.level)) > 0)
                fail(where + "volume ratio above C");
            if (!state.survives(node.nested)) fail(where + "nested cube does not survive");
            for (std::size_t j = i + 1; j < layer.size(); ++j)
                if (cmp_sum(sup_dist(c, layer[j].ball->center.coords()),
                            {node.ball->shrunk_radius(p.tau), layer[j].ball->shrunk_radius(p.tau)}) < 0)
                    fail(where + "shrunk ball overlaps node " + std::to_string(j));
        }
        if (total != 1) fail("layer " + std::to_string(n) + " mass is " + to_string(total));
        for (std::size_t k = 0; k < parents.size(); ++k)
            if (child_mass[k] != parents[k].mass) fail("layer " + std::to_string(n) + " parent " + std::to_string(k) +
                                                       " mass not conserved");
    }
    return out;
}

std::vector<RationalVec> deepest_centers(const CantorTree& tree) {
    std::vector<RationalVec> out;
    const Grid grid = tree_grid(tree);
    for (const auto& node : tree.layers.back())
        out.push_back(node.ball ? node.ball->center.coords() : grid.center(node.nested));
    return out;
}

}  // namespace badapprox
