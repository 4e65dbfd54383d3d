#include "badapprox/enumerate.hpp"
#include "badapprox/errors.hpp"
#include "badapprox/pruning.hpp"
#include "dense_oracle.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace badapprox;

namespace {

ConstructionParams line_params(unsigned stages = 3) {
    ConstructionParams p;
    p.d = 1;
    p.tau = 2;
    p.m = 2;
    p.t = 2;
    p.u = 4;
    p.max_stage = stages;
    return p;
}

const oracle::DenseLine& dense() {
    static const oracle::DenseLine ref(oracle::LineParams{}, 3);
    return ref;
}

Rational R(long p, long q = 1) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

}  // namespace

TEST_CASE("schedule values") {
    auto p = line_params();
    CHECK(prune_level(p, 1) == 6);
    CHECK(prune_level(p, 2) == 7);
    CHECK(prune_level(p, 3) == 9);
    CHECK(prune_level(p, 0) == 4);
    CHECK(cmp_power(delta(p, 1), PowerRadius(1, 2, -13)) == 0);
    CHECK(cmp_power(dangerous_coeff(p), PowerRadius(1, 2, -13)) == 0);

    ConstructionParams q;
    q.d = 2;
    q.tau = 1;
    q.m = 2;
    q.t = 2;
    q.u = 4;
    CHECK(prune_level(q, 1) == 5);
    CHECK(prune_level(q, 2) == 6);
    CHECK(cmp_power(dangerous_coeff(q), PowerRadius(1, 2, -17)) == 0);
}

TEST_CASE("schedule steps are floor or ceiling of the slope") {
    for (unsigned d = 1; d <= 3; ++d)
        for (auto tau : {R(2), R(1), R(3, 2), R(7, 5), R(5, 2)}) {
            ConstructionParams p;
            p.d = d;
            p.tau = tau;
            p.t = 3;
            if (tau.get_num() * d <= tau.get_den()) continue;
            const Rational slope = (1 + tau) * d / (d + 1);
            const Integer lo = floor(slope), hi = ceil(slope);
            for (unsigned n = 1; n < 40; ++n) {
                const Integer step = Integer(prune_level(p, n + 1)) - Integer(prune_level(p, n));
                CHECK((step == lo || step == hi));
                CHECK(step > 0);
                CHECK(prune_level(p, n) > n);
            }
        }
}

TEST_CASE("parameter validation names the constraint") {
    auto p = line_params();
    p.u = 3;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("u >= 4 required"), InvalidParams);
    p = line_params();
    p.t = 1;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("t^d <= d!"), InvalidParams);
    p = line_params();
    p.tau = R(1, 2);
    p.d = 1;
    CHECK_THROWS_AS(p.validate(), InvalidParams);
    p = line_params();
    p.d = 2;
    p.tau = R(1, 2);
    p.t = 2;
    CHECK_THROWS_AS(p.validate(), InvalidParams);  // tau = 1/d is not enough
    p.tau = R(3, 5);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("hyperplane records") {
    PruningState st(line_params());
    // 1/3 lies in the level-2 host [5/16, 11/32)... find it through the grid.
    const GridCube h = st.grid().cube_containing({R(1, 3)}, 2);
    const auto& rec = st.hyperplane_of(h);
    REQUIRE(rec.flat.has_value());
    CHECK(rec.flat->dim() == 0);
    CHECK(rec.flat->base()[0] == R(1, 3));
    // A level-1 host away from 0, 1/2, 1 holds no rational with q < 2.
    const auto& empty = st.hyperplane_of(GridCube{1, {3}});
    CHECK_FALSE(empty.flat.has_value());
    CHECK_FALSE(st.is_starred(GridCube{1, {3}}));
    // Stage 1: every non-empty record is starred.
    CHECK(st.is_starred(st.grid().cube_containing({R(0)}, 1)));
    CHECK(st.is_starred(st.grid().cube_containing({R(1)}, 1)));
}

TEST_CASE("width below Q^-2 keeps at most one rational per host") {
    // Simplex-lemma precondition in d = 1, checked by brute force for every host up to stage 4.
    PruningState st(line_params(4));
    for (unsigned n = 1; n <= 4; ++n) {
        const long q_hi = oracle::ipow(2, n);
        for (const auto& r : oracle::DenseLine::rationals(1, q_hi)) {
            const GridCube h = st.grid().cube_containing({R(r.p, r.q)}, n);
            const auto& rec = st.hyperplane_of(h);
            CHECK(rec.rationals.size() == 1);
            CHECK(rec.flat->dim() == 0);
        }
    }
}

TEST_CASE("starredness matches the dense oracle") {
    PruningState st(line_params());
    for (int k = 1; k <= 3; ++k) {
        const auto& ref = dense().starred(k);
        for (const auto& r : oracle::DenseLine::rationals(1, oracle::ipow(2, k))) {
            const GridCube h = st.grid().cube_containing({R(r.p, r.q)}, k);
            const bool want = ref.count(h.index[0].get_si()) > 0;
            CHECK(st.is_starred(h) == want);
        }
    }
    // The record hosting 1/3 at stage 2 (q = 3 in the band [2, 4)).
    const GridCube h13 = st.grid().cube_containing({R(1, 3)}, 2);
    CHECK(st.is_starred(h13) == (dense().starred(2).count(h13.index[0].get_si()) > 0));
}

TEST_CASE("lazy survival agrees with the dense oracle cube by cube") {
    PruningState st(line_params());
    for (int k = 1; k <= 3; ++k) {
        const long lvl = dense().level(k);
        const long cells = dense().cells(lvl);
        long mismatches = 0;
        for (long i = 0; i < cells; ++i)
            if (st.survives(GridCube{static_cast<unsigned>(lvl), {i}}) != dense().survives(k, i)) ++mismatches;
        CHECK(mismatches == 0);
    }
}

TEST_CASE("monotone nesting and survivor scan") {
    PruningState st(line_params());
    for (unsigned k = 2; k <= 3; ++k) {
        Integer count = 0;
        st.for_each_survivor(k, [&](const GridCube& c) {
            ++count;
            CHECK(st.survives(st.grid().ancestor(c, st.level(k - 1))));
        });
        CHECK(count == dense().survivors(static_cast<int>(k)));
    }
}

TEST_CASE("measure certificates") {
    PruningState st(line_params());
    for (unsigned n = 1; n <= 3; ++n) {
        auto rep = surviving_measure(st, n);
        REQUIRE(rep.exact.has_value());
        const Rational want = R(dense().survivors(static_cast<int>(n)), dense().cells(dense().level(n)));
        CHECK(*rep.exact == want);
        CHECK(*rep.exact >= rep.bound);
        CHECK(rep.bound >= rep.closed_form_bound);
        CHECK(rep.consistent());
        // The union-bound tally counts each starred point's cubes separately.
        for (unsigned k = 1; k <= n; ++k) {
            const Rational ref = R(dense().removed_sum(static_cast<int>(k)), dense().cells(dense().level(k)));
            CHECK(rep.removed_per_stage[k - 1] == ref);
        }
    }
    auto two = surviving_measure(st, 2);
    // Regression fixture for the exact stage-2 measure.
    CHECK(*two.exact == R(32746, 32768));
    CHECK(dense().survivors(2) == 32746);
}

TEST_CASE("empty removal sums give full measure") {
    CHECK(closed_form_measure_bound(line_params(), 0) == 1);
    CHECK(retention_bound(line_params(), 2, 2) == 1);
}

TEST_CASE("measure budget refusal") {
    PruningState st(line_params());
    st.set_budget(1000);
    CHECK_THROWS_AS(surviving_measure(st, 1), BudgetExceeded);
    auto rep = surviving_measure(st, 1, false);
    CHECK_FALSE(rep.exact.has_value());
}

TEST_CASE("leading rationals match brute force") {
    PruningState st(line_params());
    auto lead = leading_rationals(st, 2);
    std::set<std::string> got;
    for (const auto& l : lead) got.insert(l.point.to_string());
    std::set<std::string> want;
    for (int k = 1; k <= 2; ++k) {
        const long lo = oracle::ipow(2, k - 1), hi = oracle::ipow(2, k);
        const auto dd = dense().delta_den(k);
        for (const auto& r : oracle::DenseLine::rationals(lo, hi)) {
            const long host = dense().host_of(r, k);
            if (!dense().starred(k).count(host)) continue;
            bool hit = k == 1;
            if (!hit) {
                const long prev = dense().level(k - 1);
                for (long j = 0; j < dense().cells(prev) && !hit; ++j)
                    hit = dense().survives(k - 1, j) && dense().cmp_dist(r, prev, j, dd) < 0;
            }
            if (hit) want.insert(RationalPoint({r.p}, r.q).to_string());
        }
    }
    CHECK(got == want);
    // Stage 1 candidates are exactly 0/1 and 1/1.
    CHECK(lead[0].point.to_string() == "0/1");
    CHECK(lead[1].point.to_string() == "1/1");
    // Every starred record contributes at least one leading rational.
    for (const auto& [host, rec] : st.records_snapshot()) {
        if (rec.stage > 2 || rec.starred != Starred::Yes) continue;
        bool found = false;
        for (const auto& l : lead) found = found || l.host == host;
        CHECK(found);
    }
}

TEST_CASE("dangerous-ball avoidance") {
    PruningState st(line_params());
    for (unsigned n = 1; n <= 3; ++n) {
        const Integer cap = Integer(1) << n;
        auto rep = check_dangerous_avoidance(st, n, cap - 1);
        CHECK(rep.ok());
        CHECK(rep.rationals_checked > 0);
    }
    CHECK_THROWS_WITH(check_dangerous_avoidance(st, 3, 8), doctest::Contains("qCap must be < N^n"));
}

TEST_CASE("avoidance agrees with a dense scan") {
    // Independent re-check at stage 3: every rational q <= 7 against every surviving level-9 cube,
    // radius c_N q^{-3} = 1 / (2^13 q^3).
    const auto& ref = dense();
    const long lvl = ref.level(3);
    long violations = 0;
    for (const auto& r : oracle::DenseLine::rationals(1, 8)) {
        const oracle::i128 den = oracle::i128(1 << 13) * r.q * r.q * r.q;
        for (long j = 0; j < ref.cells(lvl); ++j)
            if (ref.survives(3, j) && ref.cmp_dist(r, lvl, j, den) < 0) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("per-cube retention at matched truncation") {
    PruningState st(line_params());
    CHECK(retention_bound(st.params(), 1, 1) == 1);
    CHECK(retention_bound(st.params(), 1, 2) == R(1, 4));
    long checked = 0;
    st.for_each_survivor(1, [&](const GridCube& c) {
        auto rep = check_cube_retention(st, c, 1, 2);
        CHECK(rep.ok());
        // Dense ratio: surviving level-7 children over 4.
        long kids = 0;
        for (long i = 0; i < 4; ++i) kids += dense().survives(2, c.index[0].get_si() * 4 + i);
        CHECK(rep.ratio == R(kids, 4));
        ++checked;
    });
    CHECK(checked == dense().survivors(1));
    auto same = check_cube_retention(st, GridCube{6, {100}}, 1, 1);
    CHECK(same.ratio == 1);
}

TEST_CASE("determinism of memo and leading lists") {
    PruningState a(line_params()), b(line_params());
    for (auto* st : {&a, &b}) {
        for (long i = 0; i < 2048; i += 7) st->survives(GridCube{7, {i}});
        leading_rationals(*st, 3);
    }
    CHECK(a.memo_snapshot() == b.memo_snapshot());
    auto la = leading_rationals(a, 3), lb = leading_rationals(b, 3);
    REQUIRE(la.size() == lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) CHECK(la[i].point == lb[i].point);
}

TEST_CASE("stage range is enforced") {
    PruningState st(line_params(2));
    CHECK_THROWS_AS(st.survives(GridCube{9, {0}}), StageOutOfRange);
    CHECK_THROWS_AS(st.survives(GridCube{8, {0}}), StageOutOfRange);  // not a pruning level
    st.deepen(3);
    CHECK_NOTHROW(st.survives(GridCube{9, {0}}));
}

TEST_CASE("d = 2 records obey the simplex lemma") {
    ConstructionParams p;
    p.d = 2;
    p.tau = 1;
    p.m = 2;
    p.t = 2;
    p.u = 4;
    p.max_stage = 2;
    PruningState st(p);
    const Box unit{{R(0), R(0)}, {R(1), R(1)}};
    for (unsigned n = 1; n <= 2; ++n)
        for (const auto& r : enumerate_rationals(unit, 1, p.n_pow(n), BoxMode::Closed)) {
            const auto& rec = st.hyperplane_of(st.grid().cube_containing(r.coords(), n));
            REQUIRE(rec.flat.has_value());
            CHECK(rec.flat->dim() <= 1);
            for (const auto& x : rec.rationals) CHECK(rec.flat->contains(x.coords()));
        }
    // Lazy stage-1 queries on a few cubes near a corner.
    std::mt19937_64 rng(1);
    const Integer cells = st.grid().cells_per_axis(5);
    std::uniform_int_distribution<long> pick(0, cells.get_si() - 1);
    int removed = 0;
    for (int i = 0; i < 200; ++i) removed += !st.survives(GridCube{5, {pick(rng) % 64, pick(rng) % 64}});
    CHECK(!st.survives(GridCube{5, {0, 0}}));  // contains the corner 0/1
    CHECK(removed >= 0);
}
