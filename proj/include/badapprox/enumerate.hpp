#pragma once

// Enumeration of canonical rational points p/q inside a box, by denominator
// range. In d = 1 this walks the Farey sequence of order qHi - 1 between the
// box ends (located by a Stern-Brocot descent with jumps), so the cost
// depends on how many fractions lie in the box rather than on qHi. In higher
// dimensions it scans q and the per-axis numerator ranges.

#include "badapprox/grid.hpp"
#include "badapprox/rational.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace badapprox {

enum class BoxMode {
    /// [lo, hi) per axis, with hi included when hi == 1 (grid cube convention).
    HalfOpen,
    Closed,
};

/// Every canonical p/q in the box with qLo <= q < qHi, sorted by q then p.
std::vector<RationalPoint> enumerate_rationals(const Box& box, const Integer& q_lo, const Integer& q_hi,
                                               BoxMode mode = BoxMode::HalfOpen);

/// Streaming form; visiting order is unspecified. Returning false stops the walk.
void for_each_rational(const Box& box, const Integer& q_lo, const Integer& q_hi, BoxMode mode,
                       const std::function<bool(const RationalPoint&)>& fn);

/// The neighbours of x in the Farey sequence of order n: the largest fraction
/// < x and the smallest fraction > x with denominator <= n.
std::pair<Rational, Rational> farey_neighbours(const Rational& x, const Integer& n);

}  // namespace badapprox
