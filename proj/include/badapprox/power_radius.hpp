#pragma once

// Exact positive reals of the form  c * B_1^{e_1} * ... * B_k^{e_k}
// with rational c > 0, integer bases B_i >= 2 and rational exponents e_i.
//
// This is the only representation the library uses for radii such as
// delta(n) = t^{-1} N^{-(n-1+u)(1+tau)}, c_N q^{-(1+tau)} or 2 q^{-(1+1/d)},
// which are irrational for general tau and d. Comparisons are exact: both
// sides are raised to the lcm of all exponent denominators.

#include "badapprox/rational.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace badapprox {

struct PowerFactor {
    Integer base;
    Rational exp;
    friend bool operator==(const PowerFactor&, const PowerFactor&) = default;
};

class PowerRadius {
public:
    PowerRadius() : coeff_(1) {}
    explicit PowerRadius(Rational coeff);
    PowerRadius(Rational coeff, Integer base, Rational exp);

    const Rational& coeff() const { return coeff_; }
    /// Sorted by base, merged, zero exponents dropped.
    const std::vector<PowerFactor>& factors() const { return factors_; }

    /// Exact value when every exponent is an integer.
    std::optional<Rational> rational_value() const;

    PowerRadius operator*(const PowerRadius& other) const;
    PowerRadius operator*(const Rational& r) const;
    PowerRadius operator/(const PowerRadius& other) const;
    PowerRadius inverse() const;
    /// Rational powers need a coefficient that is 1 or an integer exponent.
    PowerRadius pow(const Rational& e) const;

    /// Diagnostic only (float).
    double log2_estimate() const;

    /// Rational enclosures lo <= value <= hi (tight to about 60 bits).
    Rational upper_bound() const;
    Rational lower_bound() const;

    friend bool operator==(const PowerRadius& a, const PowerRadius& b);

private:
    void normalize();

    Rational coeff_;
    std::vector<PowerFactor> factors_;
};

/// Size limit (bits) for the integers built by exact comparisons; read once
/// from BADAPPROX_PRECISION_BITS, default 1 << 24.
std::size_t precision_budget_bits();
void set_precision_budget_bits(std::size_t bits);

/// Exact ordering of real values. Throws ComparisonBudgetExceeded.
std::strong_ordering cmp_power(const PowerRadius& a, const PowerRadius& b);
std::strong_ordering cmp_power(const Rational& a, const PowerRadius& b);

/// Ordering of x against sum(terms). Exact when every term is rational;
/// otherwise decided by interval refinement (distinct values separate).
std::strong_ordering cmp_sum(const Rational& x, const std::vector<PowerRadius>& terms);

inline bool less(const Rational& a, const PowerRadius& b) { return cmp_power(a, b) < 0; }
inline bool less_equal(const Rational& a, const PowerRadius& b) { return cmp_power(a, b) <= 0; }

std::string to_string(const PowerRadius& r);

}  // namespace badapprox
