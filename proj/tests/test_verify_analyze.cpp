#include "badapprox/errors.hpp"
#include "badapprox/mass.hpp"
#include "badapprox/verify.hpp"
#include "dense_oracle.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace badapprox;

namespace {

Rational R(long p, long q = 1) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

// min over all integers p of |x - p/q|, by scanning p in [floor(qx) - 1, floor(qx) + 2]
Rational brute_dist(const Rational& x, long q) {
    const long base = floor(Rational(x * q)).get_si();
    Rational best = -1;
    for (long p = base - 1; p <= base + 2; ++p) {
        Rational g = abs(x - R(p, q));
        if (best < 0 || g < best) best = g;
    }
    return best;
}

// Convergent denominators of a rational in [0,1).
std::vector<Integer> convergent_denominators(Rational x) {
    std::vector<Integer> qs;
    Integer q_prev = 1, q = 0;  // q_{-2}, q_{-1}
    for (;;) {
        const Integer a = floor(x);
        const Integer nq = a * q + q_prev;
        qs.push_back(nq);
        q_prev = q;
        q = nq;
        x -= a;
        if (x == 0) break;
        x = 1 / x;
    }
    return qs;
}

// [0; a1, a2, ...]
Rational from_cf(const std::vector<long>& a) {
    Rational x = 0;
    for (std::size_t i = a.size(); i-- > 0;) x = 1 / (Rational(a[i]) + x);
    return x;
}

ConstructionParams line_params(unsigned stages = 3) {
    ConstructionParams p;
    p.max_stage = stages;
    return p;
}

}  // namespace

TEST_CASE("best_approx: worked value and brute force") {
    const auto b = best_approx({R(3, 7)}, 5);
    REQUIRE(b.size() == 5);
    CHECK(b[1].q == 2);
    CHECK(b[1].dist == R(1, 14));
    CHECK(best_approx({R(3, 7)}, 7)[6].dist == 0);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 40; ++t) {
        const Rational x = R(static_cast<long>(rng() % 10007), 10007);
        const auto ba = best_approx({x}, 60);
        for (long q = 1; q <= 60; ++q) CHECK(ba[q - 1].dist == brute_dist(x, q));
    }
}

TEST_CASE("best_approx: sup-norm is the max of the coordinate distances") {
    const RationalVec x{R(5, 17), R(11, 29)};
    const auto two = best_approx(x, 40);
    const auto a = best_approx({x[0]}, 40), b = best_approx({x[1]}, 40);
    for (std::size_t i = 0; i < two.size(); ++i) CHECK(two[i].dist == std::max(a[i].dist, b[i].dist));
}

TEST_CASE("best_approx agrees with continued-fraction convergents") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
        const long den = 50000 + static_cast<long>(rng() % 50000);
        const Rational x = R(static_cast<long>(rng() % den), den);
        const auto ba = best_approx({x}, 3000);
        Rational running = -1;
        std::vector<Rational> prefix_min;
        for (const auto& e : ba) {
            if (running < 0 || e.dist < running) running = e.dist;
            prefix_min.push_back(running);
        }
        // running minimum is nonincreasing
        for (std::size_t i = 1; i < prefix_min.size(); ++i) CHECK(prefix_min[i] <= prefix_min[i - 1]);
        // each convergent q_k (k >= 1) strictly beats every smaller denominator
        const auto qs = convergent_denominators(x);
        for (std::size_t k = 1; k < qs.size(); ++k) {
            if (qs[k] > 3000) break;
            const long qk = qs[k].get_si();
            if (qk < 2) continue;
            CHECK(ba[qk - 1].dist < prefix_min[qk - 2]);
        }
    }
}

TEST_CASE("membership band: rational points are refuted") {
    const PowerRadius c_n = dangerous_coeff(line_params());
    const auto v = check_membership_band({R(1, 2)}, Rational(2), c_n, 10);
    CHECK(v.verdict == Verdict::Refuted);
    CHECK(v.violations.front().dist == 0);
    CHECK(v.violations.front().point.denominator() == 2);
    CHECK_THROWS_AS(check_membership_band({R(1, 2)}, Rational(2), PowerRadius(2), 10), InvalidParams);
}

TEST_CASE("membership band: constructed point with large partial quotients") {
    // a_{k+1} > q_k gives |x - p_k/q_k| < q_k^{-3}; a_{k+1} < 2^13 q_k keeps it above c_N q_k^{-3}
    const Rational x = from_cf({3, 5, 40, 2000, 7});
    const PowerRadius c_n = dangerous_coeff(line_params());
    const auto v = check_membership_band({x}, Rational(2), c_n, 10000);

    // nearest p per q, kept when canonical
    std::vector<long> expect;
    for (long q = 1; q <= 10000; ++q) {
        const long base = floor(Rational(x * q)).get_si();
        long p = base;
        if (abs(x - R(base + 1, q)) < abs(x - R(base, q))) p = base + 1;
        if (std::gcd(p, q) != 1) continue;
        const Rational g = abs(x - R(p, q));
        if (g * q * q * q < 1) expect.push_back(q);
    }
    REQUIRE(v.witnesses.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(v.witnesses[i].point.denominator() == expect[i]);
    CHECK(expect.size() >= 3);
    CHECK(v.violations.empty());
    CHECK(v.verdict == Verdict::ConfirmedPattern);

    // below the second witness: too few witnesses
    const auto early = check_membership_band({x}, Rational(2), c_n, 10);
    CHECK(early.verdict == Verdict::Inconclusive);
}

TEST_CASE("membership band: tree centers are not refuted below their own band") {
    PruningState st(line_params());
    TreeConfig cfg;
    cfg.seed_center = {R(1, 2)};
    cfg.seed_radius = R(1, 4);
    cfg.depth = 1;
    cfg.policy = GPolicy::Report;
    const CantorTree tree = build_tree(st, cfg);
    const PowerRadius c_n = dangerous_coeff(st.params());
    for (const auto& node : tree.layers.back()) {
        const unsigned k = node.ball->stage;
        const Integer cap = st.params().n_pow(k - 1) - 1;
        const auto v = check_membership_band(node.ball->center.coords(), Rational(2), c_n, cap);
        CHECK(v.verdict != Verdict::Refuted);
    }
}

TEST_CASE("simplex suite: d = 1 boxes of length Q^-2 hold at most one rational") {
    // independent: distinct p/q, p'/q' with q, q' <= Q differ by at least Q^-2
    for (long Q = 2; Q <= 8; ++Q) {
        const auto all = oracle::brute_rationals({R(0)}, {R(1)}, 1, Q + 1, true);
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j) {
                const Rational a = R(all[i].first[0], all[i].second), b = R(all[j].first[0], all[j].second);
                if (a != b) CHECK(abs(a - b) >= R(1, Q * Q));
            }
        const auto rep = simplex_property_suite(1, static_cast<unsigned>(Q), 200, 5 + Q);
        CHECK(rep.ok());
        CHECK(rep.volume == R(1, Q * Q));
    }
}

TEST_CASE("simplex suite: d = 2 boxes at the volume bound are collinear") {
    for (unsigned Q = 2; Q <= 8; ++Q) {
        const auto rep = simplex_property_suite(2, Q, 150, 100 + Q);
        CHECK(rep.ok());
        CHECK(rep.volume == Rational(1) / (2 * Rational(Q * Q * Q)));
    }
    // independent rank check via determinant signs on the same kind of boxes
    std::mt19937_64 rng(77);
    const unsigned Q = 6;
    const Rational vol = Rational(1, 2 * Q * Q * Q);
    for (int t = 0; t < 200; ++t) {
        const Rational s0 = R(2 + static_cast<long>(rng() % 15), 8 * Q);
        const Rational s1 = vol / s0;
        const Rational x0 = R(static_cast<long>(rng() % 900), 1000), y0 = R(static_cast<long>(rng() % 900), 1000);
        const auto pts = oracle::brute_rationals({x0, y0}, {x0 + s0, y0 + s1}, 1, Q + 1, true);
        for (std::size_t i = 0; i + 2 < pts.size(); ++i)
            for (std::size_t j = i + 1; j + 1 < pts.size(); ++j)
                for (std::size_t k = j + 1; k < pts.size(); ++k) {
                    auto P = [&](std::size_t n, int c) { return R(pts[n].first[c], pts[n].second); };
                    const Rational det = (P(j, 0) - P(i, 0)) * (P(k, 1) - P(i, 1)) -
                                         (P(j, 1) - P(i, 1)) * (P(k, 0) - P(i, 0));
                    CHECK(det == 0);
                }
    }
}

TEST_CASE("simplex negative control and vacuous boxes") {
    for (unsigned Q = 3; Q <= 8; ++Q) {
        const auto rep = simplex_negative_control(Q);
        CHECK_FALSE(rep.ok());
        CHECK(rep.violations.front().points == 2);
        CHECK(rep.volume > Rational(1, Q * Q));
    }
    CHECK_THROWS_AS(simplex_negative_control(2), InvalidParams);
    // oversized random boxes at d = 1 fail somewhere
    CHECK_FALSE(simplex_property_suite(1, 5, 300, 9, Rational(3)).ok());
    // Q = 1, d = 1 is the equality case of the non-strict bound: the only box is [0,1] itself
    const auto v = simplex_property_suite(1, 1, 5, 2);
    CHECK(v.violations.size() == 5);
    CHECK(v.violations.front().box.lo[0] == 0);
    CHECK(v.violations.front().box.hi[0] == 1);
    // a box with no rationals of denominator <= 3 passes vacuously
    const auto empty = simplex_property_suite(1, 3, 400, 8);
    CHECK(empty.ok());
    CHECK(empty.vacuous > 0);
}

TEST_CASE("check_q_approx at the d=1 fixture, stage 3") {
    PruningState st(line_params());
    const auto rep = check_q_approx(st, 3, 100, 42);
    REQUIRE(rep.samples.size() == 100);
    CHECK(rep.passed == 100);
    const oracle::DenseLine dense(oracle::LineParams{}, 3);
    for (const auto& s : rep.samples) {
        REQUIRE(s.witness);
        CHECK(dense.survives(3, s.cube.index[0].get_si()));
        const Integer q = s.witness->point.denominator();
        const Rational x = s.witness->point.coord(0);
        CHECK(s.dist == abs(x - s.center[0]));
        CHECK(s.dist * Rational(q * q) < 3);
        // leading at its stage per the dense oracle: the host is starred with this rational
        const unsigned k = s.witness->stage;
        const oracle::LineRational lr{x.get_num().get_si(), x.get_den().get_si()};
        const auto& star = dense.starred(static_cast<int>(k));
        const auto it = star.find(dense.host_of(lr, static_cast<int>(k)));
        REQUIRE(it != star.end());
        CHECK(it->second.p == lr.p);
        CHECK(it->second.q == lr.q);
    }
    const auto again = check_q_approx(st, 3, 100, 42);
    for (std::size_t i = 0; i < rep.samples.size(); ++i) CHECK(again.samples[i].cube == rep.samples[i].cube);
}

TEST_CASE("box counting") {
    std::vector<RationalVec> line;
    for (long i = 0; i <= 1024; ++i) line.push_back({R(i, 1024)});
    const auto s = box_count(line, dyadic_scales(1, 8));
    CHECK(s.counts.front() == 2);
    CHECK(s.counts.back() == 256);
    CHECK(std::abs(s.slope - 1) < 0.05);
    CHECK(s.monotone);

    const auto one = box_count({{R(1, 3)}}, dyadic_scales(1, 6));
    CHECK(one.degenerate);
    CHECK(one.slope == 0);

    // the top face belongs to the last box
    const auto ends = box_count({{R(0)}, {R(1)}}, {PowerRadius(1), PowerRadius(R(1, 2))});
    CHECK(ends.counts[0] == 1);
    CHECK(ends.counts[1] == 2);

    // monotone under halving for random point sets, d = 2
    std::mt19937_64 rng(5);
    std::vector<RationalVec> pts;
    for (int i = 0; i < 300; ++i)
        pts.push_back({R(static_cast<long>(rng() % 4096), 4096), R(static_cast<long>(rng() % 4096), 4096)});
    const auto m = box_count(pts, dyadic_scales(0, 10));
    CHECK(m.monotone);
    for (std::size_t i = 0; i < m.counts.size(); ++i) {
        std::set<std::pair<long, long>> boxes;
        const long cells = 1L << i;
        for (const auto& p : pts)
            boxes.insert({floor(Rational(p[0] * cells)).get_si(), floor(Rational(p[1] * cells)).get_si()});
        CHECK(m.counts[i] == static_cast<long>(boxes.size()));
    }

    CHECK_THROWS_AS(box_count(line, {PowerRadius(R(1, 2))}), InvalidParams);
    CHECK_THROWS_AS(box_count(line, {PowerRadius(R(1, 4)), PowerRadius(R(1, 2))}), InvalidParams);
    CHECK_THROWS_AS(box_count({}, dyadic_scales(1, 2)), InvalidParams);
}
