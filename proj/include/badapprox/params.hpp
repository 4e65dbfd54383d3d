#pragma once

// Construction parameters and the pruning schedule.
//
//   l(n)     = floor((n - 1 + u)(1 + tau) d / (d + 1))
//   delta(n) = t^{-1} N^{-(n - 1 + u)(1 + tau)}
//   c_N      = t^{-1} N^{-u(1 + tau)}
//
// with N = M^d. Radii are kept as powers of M so they combine exactly with
// grid sides t^{-1} M^{-level(d+1)}.

#include "badapprox/power_radius.hpp"
#include "badapprox/rational.hpp"

#include <string>

namespace badapprox {

struct ConstructionParams {
    unsigned d = 1;
    Rational tau{2};
    Integer m{2};
    Integer t{2};
    unsigned u = 4;
    unsigned max_stage = 3;

    Integer n() const { return pow(m, d); }
    /// N^k.
    Integer n_pow(unsigned k) const { return pow(m, static_cast<unsigned long>(d) * k); }
    /// Throws InvalidParams naming the violated constraint.
    void validate() const;

    friend bool operator==(const ConstructionParams&, const ConstructionParams&) = default;
};

struct ScheduleValue {
    unsigned stage = 0;
    unsigned prune_level = 0;
    PowerRadius delta;
    PowerRadius c_n;
};

/// l(n), defined for n >= 0 (l(0) is used by the stage-1 convention).
unsigned prune_level(const ConstructionParams& p, unsigned n);
PowerRadius delta(const ConstructionParams& p, unsigned n);
PowerRadius dangerous_coeff(const ConstructionParams& p);
ScheduleValue schedule(const ConstructionParams& p, unsigned n);

/// s = (d + 1) / (1 + tau).
Rational target_dimension(const ConstructionParams& p);

/// The stage whose denominator band [N^{n-1}, N^n) holds q.
unsigned band_of(const ConstructionParams& p, const Integer& q);

}  // namespace badapprox
