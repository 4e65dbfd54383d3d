#pragma once

// Independent reference computations for the unit tests. These avoid the
// library's fast paths: plain loops over integers, no Farey walks, no LPs.

#include "badapprox/rational.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace oracle {

using badapprox::Integer;
using badapprox::Rational;
using badapprox::RationalVec;

// All canonical p/q with q in [qLo, qHi) inside the box, lo <= x < hi (x == hi allowed when hi == 1).
inline std::vector<std::pair<std::vector<long>, long>> brute_rationals(const RationalVec& lo, const RationalVec& hi,
                                                                       long q_lo, long q_hi, bool closed = false) {
    std::vector<std::pair<std::vector<long>, long>> out;
    const std::size_t d = lo.size();
    for (long q = std::max(1L, q_lo); q < q_hi; ++q) {
        std::vector<long> p(d, 0);
        const long span = q + 1;
        long total = 1;
        for (std::size_t i = 0; i < d; ++i) total *= span;
        for (long code = 0; code < total; ++code) {
            long c = code;
            for (std::size_t i = d; i-- > 0;) {
                p[i] = c % span;
                c /= span;
            }
            long g = q;
            for (long v : p) g = std::gcd(g, v);
            if (g != 1) continue;
            bool in = true;
            for (std::size_t i = 0; i < d && in; ++i) {
                Rational x(p[i], q);
                x.canonicalize();
                in = x >= lo[i] && (closed || hi[i] == 1 ? x <= hi[i] : x < hi[i]);
            }
            if (in) out.emplace_back(p, q);
        }
    }
    return out;
}

// Chebyshev distance from x to the segment {base + s*dir : s in [s0, s1]} by
// dense sampling; an upper bound that converges to the true value.
inline Rational sampled_dist_to_line(const RationalVec& x, const RationalVec& base, const RationalVec& dir,
                                     const Rational& s0, const Rational& s1, long steps) {
    Rational best = -1;
    for (long k = 0; k <= steps; ++k) {
        Rational s = s0 + (s1 - s0) * Rational(k, steps);
        Rational m = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            Rational v = x[i] - base[i] - s * dir[i];
            if (v < 0) v = -v;
            if (v > m) m = v;
        }
        if (best < 0 || m < best) best = m;
    }
    return best;
}

}  // namespace oracle
