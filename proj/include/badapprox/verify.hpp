#pragma once

// Point-level verification and empirical analysis: best approximations,
// truncated band membership, Simplex-Lemma property sampling, the
// leading-rational approximation check and box counting.

#include "badapprox/pruning.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace badapprox {

struct BestApprox {
    Integer q;
    RationalPoint point;              // reduced form of p/q
    std::vector<Integer> numerators;  // p_i: nearest integer to q x_i, ties up
    Rational dist;
};

/// One entry per q = 1..qCap.
std::vector<BestApprox> best_approx(const RationalVec& x, const Integer& q_cap);

enum class Verdict { ConfirmedPattern, Refuted, Inconclusive };
std::string to_string(Verdict v);

struct Witness {
    RationalPoint point;
    Rational dist;
};

struct MembershipVerdict {
    RationalVec point;
    Integer q_cap;
    Integer cutoff;
    std::vector<Witness> witnesses;   // dist < q^{-(1+tau)}
    std::vector<Witness> violations;  // dist < cLow q^{-(1+tau)} with q >= cutoff
    Verdict verdict = Verdict::Inconclusive;
};

/// For each q <= qCap the nearest p/q (when canonical) is tested. Never claims
/// the infinite statement.
MembershipVerdict check_membership_band(const RationalVec& x, const Rational& tau, const PowerRadius& c_low,
                                        const Integer& q_cap, const Integer& cutoff = 1,
                                        std::size_t witness_threshold = 3);

struct SimplexTrial {
    Box box;
    std::size_t points = 0;
    unsigned hull_dim = 0;
};

struct SimplexSuiteReport {
    unsigned d = 0;
    unsigned q = 0;
    std::uint64_t trials = 0;
    Rational volume;              // volume of every sampled box
    std::uint64_t vacuous = 0;    // boxes holding no rationals
    std::vector<SimplexTrial> violations;
    bool ok() const { return violations.empty(); }
};

/// Boxes of volume exactly scale * (d!)^{-1} Q^{-(d+1)}; scale 1 is the Lemma's bound.
SimplexSuiteReport simplex_property_suite(unsigned d, unsigned q, std::uint64_t trials, std::uint64_t rng_seed,
                                          const Rational& volume_scale = 1);
/// d = 1: the closed interval [1/Q, 1/(Q-1)] (length 1/(Q(Q-1)) > Q^{-2}) holds two
/// rationals with q <= Q, so the hull has dimension 1. Requires Q >= 3.
SimplexSuiteReport simplex_negative_control(unsigned q);

struct QApproxSample {
    GridCube cube;
    RationalVec center;
    std::optional<LeadingRational> witness;
    Rational dist;
};

struct QApproxReport {
    unsigned stage = 0;
    std::vector<QApproxSample> samples;
    std::uint64_t passed = 0;
    double pass_rate() const { return samples.empty() ? 0.0 : double(passed) / double(samples.size()); }
};

/// Centers of random surviving level-l(n) cubes; each needs a leading rational
/// of stage <= n with sup_dist < 3 q^{-(1+1/d)}.
QApproxReport check_q_approx(PruningState& state, unsigned stage, std::uint64_t samples, std::uint64_t rng_seed);

struct BoxCountSeries {
    std::vector<Rational> scales;
    std::vector<Integer> counts;
    double slope = 0;  // least squares of log N against log(1/eps); diagnostic precision
    bool degenerate = false;
    bool monotone = true;
};

/// Boxes are [k eps, (k+1) eps) per axis, with a point on the top face of
/// [0,1]^d counted in the last box. Scales must be rational and strictly decreasing.
BoxCountSeries box_count(const std::vector<RationalVec>& points, const std::vector<PowerRadius>& scales);
/// 2^{-lo} .. 2^{-hi}.
std::vector<PowerRadius> dyadic_scales(unsigned lo, unsigned hi);

}  // namespace badapprox
