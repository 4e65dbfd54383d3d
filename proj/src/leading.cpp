#include "badapprox/enumerate.hpp"
#include "badapprox/errors.hpp"
#include "badapprox/pruning.hpp"

namespace badapprox {

std::optional<LeadingRational> leading_of(PruningState& state, const RationalPoint& p) {
    const auto coords = p.coords();
    for (const auto& x : coords)
        if (x < 0 || x > 1) return std::nullopt;
    const unsigned k = band_of(state.params(), p.denominator());
    if (k > state.max_stage())
        throw StageOutOfRange("q = " + p.denominator().get_str() + " lies in band " + std::to_string(k) +
                              " beyond maxStage " + std::to_string(state.max_stage()));
    const GridCube host = state.grid().cube_containing(coords, k);
    if (!state.is_starred(host)) return std::nullopt;
    // p has q < N^k and lies in the host, so it is one of the record's rationals and lies on the flat.
    if (!state.ball_meets_survivors(coords, state.schedule(k).delta, k - 1)) return std::nullopt;
    return LeadingRational{p, k, host};
}

std::vector<LeadingRational> leading_rationals(PruningState& state, unsigned stage) {
    const ConstructionParams& p = state.params();
    if (stage > p.max_stage) throw StageOutOfRange("leading rationals beyond maxStage");
    const Box unit{RationalVec(p.d, Rational(0)), RationalVec(p.d, Rational(1))};
    std::vector<LeadingRational> out;
    for (unsigned k = 1; k <= stage; ++k) {
        for (const auto& r : enumerate_rationals(unit, p.n_pow(k - 1), p.n_pow(k), BoxMode::Closed))
            if (auto lr = leading_of(state, r)) out.push_back(*lr);
    }
    return out;
}

AvoidanceReport check_dangerous_avoidance(PruningState& state, unsigned stage, const Integer& q_cap) {
    const ConstructionParams& p = state.params();
    if (stage < 1 || stage > p.max_stage) throw StageOutOfRange("avoidance stage outside 1..maxStage");
    if (q_cap >= p.n_pow(stage)) throw InvalidParams("qCap must be < N^n");
    AvoidanceReport rep;
    rep.stage = stage;
    rep.q_cap = q_cap;
    const Grid& grid = state.grid();
    const unsigned lvl = state.level(stage);
    const PowerRadius cn = dangerous_coeff(p);
    const Box unit{RationalVec(p.d, Rational(0)), RationalVec(p.d, Rational(1))};
    for (const auto& r : enumerate_rationals(unit, 1, q_cap + 1, BoxMode::Closed)) {
        ++rep.rationals_checked;
        const PowerRadius radius = cn * PowerRadius(1, r.denominator(), -(1 + p.tau));
        const RationalVec c = r.coords();
        grid.for_each_near(Box{c, c}, radius.upper_bound(), lvl, [&](const GridCube& cube) {
            if (!ball_meets_box(c, radius, grid.closed_box(cube))) return;
            if (state.survives(cube)) rep.violations.push_back({r, cube});
        });
    }
    return rep;
}

}  // namespace badapprox
