#include "badapprox/enumerate.hpp"
#include "badapprox/errors.hpp"
#include "badapprox/pruning.hpp"

#include <set>

namespace badapprox {

namespace {

// M^{(d+1) e} for a possibly negative integer e, i.e. N^{(d+1)e/d}.
Rational scale_power(const ConstructionParams& p, long e) {
    return pow(Rational(p.m), e * static_cast<long>(p.d + 1));
}

bool all_vertices_within(const Grid& grid, const GridCube& c, const AffineFlat& flat, const Box& clip,
                         const PowerRadius& r) {
    const Box b = grid.closed_box(c);
    const std::size_t d = b.dim();
    for (unsigned long mask = 0; mask < (1UL << d); ++mask) {
        RationalVec v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? b.hi[i] : b.lo[i];
        auto dist = dist_box_to_flat_piece(Box{v, v}, flat, clip);
        if (!dist || !less_equal(*dist, r)) return false;
    }
    return true;
}

Integer count_meeting(const Grid& grid, const GridCube& c, unsigned target, const AffineFlat& flat,
                      const GridCube& host, const PowerRadius& r) {
    if (!cube_meets_thickening(grid, c, flat, host, r)) return 0;
    if (c.level == target) return 1;
    // The distance to a convex set is convex, so all vertices within r means the whole cube is.
    if (all_vertices_within(grid, c, flat, grid.closed_box(host), r)) return grid.descendant_count(c, target);
    Integer total = 0;
    for (const auto& child : grid.subdivide(c)) total += count_meeting(grid, child, target, flat, host, r);
    return total;
}

}  // namespace

bool MeasureReport::consistent() const {
    if (exact && *exact < bound) return false;
    return bound >= closed_form_bound;
}

Rational closed_form_measure_bound(const ConstructionParams& p, unsigned stage) {
    Rational sum = 0;
    for (unsigned k = 1; k <= stage; ++k)
        sum += scale_power(p, static_cast<long>(k) - static_cast<long>(prune_level(p, k)));
    Rational out = 1 - 3 * sum / pow(Rational(p.t), static_cast<long>(p.d));
    out.canonicalize();
    return out;
}

Integer removed_cube_count(PruningState& state, const HyperplaneRecord& rec) {
    if (!rec.flat) return 0;
    const Grid& grid = state.grid();
    const unsigned target = state.level(rec.stage);
    const PowerRadius& r = state.schedule(rec.stage).delta;
    Integer total = 0;
    IndexVec lo, hi;
    for (const auto& i : rec.host.index) {
        lo.push_back(i - 1);
        hi.push_back(i + 1);
    }
    for_each_index(lo, hi, [&](const IndexVec& idx) {
        GridCube c{rec.stage, idx};
        if (grid.valid(c)) total += count_meeting(grid, c, target, *rec.flat, rec.host, r);
    });
    return total;
}

MeasureReport surviving_measure(PruningState& state, unsigned stage, bool exact) {
    const ConstructionParams& p = state.params();
    if (stage < 1 || stage > p.max_stage) throw StageOutOfRange("measure stage outside 1..maxStage");
    MeasureReport rep;
    rep.stage = stage;
    rep.closed_form_bound = closed_form_measure_bound(p, stage);

    Rational removed = 0;
    const Box unit{RationalVec(p.d, Rational(0)), RationalVec(p.d, Rational(1))};
    for (unsigned k = 1; k <= stage; ++k) {
        std::set<GridCube> hosts;
        for_each_rational(unit, 1, p.n_pow(k), BoxMode::Closed, [&](const RationalPoint& r) {
            hosts.insert(state.grid().cube_containing(r.coords(), k));
            return true;
        });
        Integer cubes = 0;
        for (const auto& h : hosts) {
            if (!state.is_starred(h)) continue;
            cubes += removed_cube_count(state, state.hyperplane_of(h));
        }
        Rational tally = cubes * state.grid().volume(state.level(k));
        tally.canonicalize();
        rep.removed_per_stage.push_back(tally);
        removed += tally;
    }
    rep.bound = 1 - removed;

    if (exact) {
        Integer count = 0;
        state.for_each_survivor(stage, [&](const GridCube&) { ++count; });
        rep.surviving_cubes = count;
        Rational v = count * state.grid().volume(state.level(stage));
        v.canonicalize();
        rep.exact = v;
    }
    return rep;
}

Rational retention_bound(const ConstructionParams& p, unsigned m, unsigned n) {
    const long lm = prune_level(p, m);
    Rational sum = 0;
    for (unsigned k = m + 1; k <= n && static_cast<long>(k) <= lm; ++k)
        sum += scale_power(p, lm - static_cast<long>(prune_level(p, k)));
    for (unsigned k = static_cast<unsigned>(lm) + 1; k <= n; ++k)
        sum += scale_power(p, static_cast<long>(k) - static_cast<long>(prune_level(p, k)));
    Rational out = 1 - 3 * sum;
    out.canonicalize();
    return out;
}

RetentionReport check_cube_retention(PruningState& state, const GridCube& cube, unsigned m, unsigned n) {
    if (n < m) throw std::invalid_argument("retention needs n >= m");
    if (cube.level != state.level(m)) throw std::invalid_argument("retention cube must lie at level l(m)");
    if (!state.survives(cube)) throw std::invalid_argument("retention cube must survive stage m");
    RetentionReport rep;
    rep.cube = cube;
    rep.m = m;
    rep.n = n;
    rep.bound = retention_bound(state.params(), m, n);
    if (n == m) {
        rep.ratio = 1;
        return rep;
    }
    Integer count = 0;
    state.for_each_survivor_in(cube, n, [&](const GridCube&) { ++count; });
    Rational ratio = count * state.grid().volume(state.level(n)) / state.grid().volume(cube.level);
    ratio.canonicalize();
    rep.ratio = ratio;
    return rep;
}

}  // namespace badapprox
