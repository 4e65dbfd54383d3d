#include "badapprox/verify.hpp"

#include "badapprox/enumerate.hpp"
#include "badapprox/errors.hpp"
#include "badapprox/flat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace badapprox {

namespace {

PowerRadius q_power(const Rational& coeff, const Integer& q, const Rational& exp) {
    if (q == 1) return PowerRadius(coeff);
    return PowerRadius(coeff, q, exp);
}

bool canonical(const std::vector<Integer>& p, const Integer& q) {
    Integer g = q;
    for (const auto& v : p) g = gcd(g, v);
    return g == 1;
}

}  // namespace

std::vector<BestApprox> best_approx(const RationalVec& x, const Integer& q_cap) {
    if (q_cap < 1) throw InvalidParams("qCap must be >= 1");
    std::vector<BestApprox> out;
    for (Integer q = 1; q <= q_cap; ++q) {
        BestApprox b;
        b.q = q;
        b.dist = 0;
        for (const auto& xi : x) {
            const Integer p = floor(Rational(q * xi + Rational(1, 2)));  // nearest, ties up
            Rational gap = abs(xi - Rational(p, q));
            gap.canonicalize();
            if (gap > b.dist) b.dist = gap;
            b.numerators.push_back(p);
        }
        b.point = RationalPoint(b.numerators, q);
        out.push_back(std::move(b));
    }
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::ConfirmedPattern: return "confirmed-pattern";
        case Verdict::Refuted: return "refuted";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

MembershipVerdict check_membership_band(const RationalVec& x, const Rational& tau, const PowerRadius& c_low,
                                        const Integer& q_cap, const Integer& cutoff, std::size_t witness_threshold) {
    if (!(cmp_power(Rational(0), c_low) < 0 && cmp_power(Rational(1), c_low) > 0))
        throw InvalidParams("cLow must lie in (0, 1)");
    MembershipVerdict v;
    v.point = x;
    v.q_cap = q_cap;
    v.cutoff = cutoff;
    const Rational e = -(1 + tau);
    for (const auto& b : best_approx(x, q_cap)) {
        if (!canonical(b.numerators, b.q)) continue;
        const PowerRadius r = q_power(1, b.q, e);
        if (!less(b.dist, r)) continue;
        v.witnesses.push_back({b.point, b.dist});
        if (b.q >= cutoff && less(b.dist, c_low * r)) v.violations.push_back({b.point, b.dist});
    }
    if (!v.violations.empty())
        v.verdict = Verdict::Refuted;
    else if (v.witnesses.size() >= witness_threshold)
        v.verdict = Verdict::ConfirmedPattern;
    else
        v.verdict = Verdict::Inconclusive;
    return v;
}

namespace {

SimplexTrial run_trial(const Box& box, unsigned q) {
    SimplexTrial t;
    t.box = box;
    std::vector<RationalVec> pts;
    for (const auto& r : enumerate_rationals(box, 1, q + 1, BoxMode::Closed)) pts.push_back(r.coords());
    t.points = pts.size();
    if (!pts.empty()) t.hull_dim = static_cast<unsigned>(affine_hull(pts).dim());
    return t;
}

}  // namespace

SimplexSuiteReport simplex_property_suite(unsigned d, unsigned q, std::uint64_t trials, std::uint64_t rng_seed,
                                          const Rational& volume_scale) {
    if (d < 1) throw InvalidParams("d >= 1 required");
    if (q < 1) throw InvalidParams("Q >= 1 required");
    if (trials < 1) throw InvalidParams("trials >= 1 required");
    SimplexSuiteReport rep;
    rep.d = d;
    rep.q = q;
    rep.trials = trials;
    Integer fact = 1;
    for (unsigned i = 2; i <= d; ++i) fact *= i;
    rep.volume = volume_scale / (Rational(fact) * Rational(pow(Integer(q), d + 1)));
    rep.volume.canonicalize();

    // Sides: s_i = k_i / (8Q) for i < d with k_i in [2, 16], the last one fixes the volume.
    // Corners are multiples of 2^-20.
    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<int> aspect(2, 16);
    const long grain = 1L << 20;
    for (std::uint64_t k = 0; k < trials; ++k) {
        RationalVec side(d);
        Rational rest = rep.volume;
        for (unsigned i = 0; i + 1 < d; ++i) {
            side[i] = Rational(aspect(rng), 8 * static_cast<long>(q));
            side[i].canonicalize();
            rest /= side[i];
        }
        side[d - 1] = rest;
        Box box{RationalVec(d), RationalVec(d)};
        bool fits = true;
        for (unsigned i = 0; i < d; ++i) {
            if (side[i] > 1) fits = false;
            const Integer room = floor(Rational((1 - side[i]) * grain));
            const long top = fits ? room.get_si() : 0;
            std::uniform_int_distribution<long> corner(0, std::max(0L, top));
            box.lo[i] = Rational(corner(rng), grain);
            box.lo[i].canonicalize();
            box.hi[i] = box.lo[i] + side[i];
        }
        const SimplexTrial t = run_trial(box, q);
        if (t.points == 0) ++rep.vacuous;
        if (t.points > 0 && t.hull_dim > d - 1) rep.violations.push_back(t);
    }
    return rep;
}

SimplexSuiteReport simplex_negative_control(unsigned q) {
    if (q < 3) throw InvalidParams("negative control needs Q >= 3");
    SimplexSuiteReport rep;
    rep.d = 1;
    rep.q = q;
    rep.trials = 1;
    Box box{{Rational(1, q)}, {Rational(1, q - 1)}};
    rep.volume = box.volume();
    const SimplexTrial t = run_trial(box, q);
    if (t.points == 0) ++rep.vacuous;
    if (t.points > 0 && t.hull_dim > 0) rep.violations.push_back(t);
    return rep;
}

QApproxReport check_q_approx(PruningState& state, unsigned stage, std::uint64_t samples, std::uint64_t rng_seed) {
    const ConstructionParams& p = state.params();
    const Grid& grid = state.grid();
    if (stage < 1 || stage > state.max_stage()) throw StageOutOfRange("check_q_approx stage outside 1..maxStage");
    QApproxReport rep;
    rep.stage = stage;
    const unsigned lvl = state.level(stage);
    const Integer cells = grid.cells_per_axis(lvl);

    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(static_cast<unsigned long>(rng_seed));
    const std::uint64_t max_draws = 100 * samples + 100;
    for (std::uint64_t draw = 0; draw < max_draws && rep.samples.size() < samples; ++draw) {
        GridCube cube{lvl, IndexVec(p.d)};
        for (auto& i : cube.index) i = rng.get_z_range(cells);
        if (!state.survives(cube)) continue;

        QApproxSample s;
        s.cube = cube;
        s.center = grid.center(cube);
        for (unsigned k = 1; k <= stage && !s.witness; ++k) {
            // 3 q^{-(1+1/d)} <= 3 N^{-(k-1)(d+1)/d} = 3 M^{-(k-1)(d+1)} on band k
            const Rational reach =
                Rational(3) / Rational(pow(p.m, static_cast<unsigned long>((k - 1) * (p.d + 1))));
            Box box{s.center, s.center};
            for (unsigned i = 0; i < p.d; ++i) {
                box.lo[i] = std::max(Rational(0), Rational(s.center[i] - reach));
                box.hi[i] = std::min(Rational(1), Rational(s.center[i] + reach));
            }
            for (const auto& r : enumerate_rationals(box, k == 1 ? Integer(1) : p.n_pow(k - 1), p.n_pow(k),
                                                     BoxMode::Closed)) {
                const Rational dist = sup_dist(s.center, r.coords());
                if (!less(dist, q_power(3, r.denominator(), -Rational(p.d + 1, p.d)))) continue;
                if (auto lr = leading_of(state, r)) {
                    s.witness = *lr;
                    s.dist = dist;
                    break;
                }
            }
        }
        if (s.witness) ++rep.passed;
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

BoxCountSeries box_count(const std::vector<RationalVec>& points, const std::vector<PowerRadius>& scales) {
    if (scales.size() < 2) throw InvalidParams("box_count needs at least 2 scales");
    if (points.empty()) throw InvalidParams("box_count needs at least 1 point");
    BoxCountSeries s;
    for (const auto& sc : scales) {
        auto v = sc.rational_value();
        if (!v) throw InvalidParams("box_count scales must be rational");
        if (!s.scales.empty() && !(*v < s.scales.back())) throw InvalidParams("scales must be strictly decreasing");
        s.scales.push_back(*v);
    }
    for (const auto& eps : s.scales) {
        const Rational inv = 1 / eps;
        const Integer last = ceil(inv) - 1;
        std::set<std::vector<Integer>> boxes;
        for (const auto& x : points) {
            std::vector<Integer> key;
            for (const auto& xi : x) key.push_back(xi == 1 ? last : floor(Rational(xi * inv)));
            boxes.insert(std::move(key));
        }
        s.counts.push_back(Integer(static_cast<unsigned long>(boxes.size())));
    }
    for (std::size_t i = 1; i < s.counts.size(); ++i)
        if (s.counts[i] < s.counts[i - 1]) s.monotone = false;

    if (std::all_of(s.counts.begin(), s.counts.end(), [&](const Integer& c) { return c == s.counts.front(); })) {
        s.degenerate = true;
        s.slope = 0;
        return s;
    }
    // Diagnostic floating point from here on.
    const std::size_t n = s.counts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = -scales[i].log2_estimate();
        const double ly = std::log2(s.counts[i].get_d());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    s.slope = den == 0 ? 0 : (n * sxy - sx * sy) / den;
    return s;
}

std::vector<PowerRadius> dyadic_scales(unsigned lo, unsigned hi) {
    std::vector<PowerRadius> out;
    for (unsigned k = lo; k <= hi; ++k) out.push_back(PowerRadius(1, 2, -Rational(k)));
    return out;
}

}  // namespace badapprox
