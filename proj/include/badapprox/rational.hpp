#pragma once

// Exact scalars and points of Q^d.
//
// Rationals are GMP mpq values kept in canonical form (positive
// denominator, gcd 1). Points carried as (p_1..p_d, q) keep one common
// denominator with gcd(p_1, ..., p_d, q) = 1, so every point of Q^d has a
// unique denominator.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace badapprox {

using Integer = mpz_class;
using Rational = mpq_class;
using RationalVec = std::vector<Rational>;

/// "num/den" (always with a slash, so "3/1" for integers).
std::string to_string(const Rational& r);
std::string to_string(const Integer& z);

/// Parses "num/den" or a bare integer. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
Integer parse_integer(std::string_view text);

Integer floor(const Rational& r);
Integer ceil(const Rational& r);
Rational abs(const Rational& r);

Integer pow(const Integer& base, unsigned long exp);
Rational pow(const Rational& base, long exp);

std::strong_ordering compare(const Rational& a, const Rational& b);

/// A rational point p/q of Q^d in canonical form.
class RationalPoint {
public:
    RationalPoint() = default;
    /// Canonicalizes: divides out gcd(p_1, ..., p_d, q). q must be positive.
    RationalPoint(std::vector<Integer> numerators, Integer denominator);

    static RationalPoint from_coords(const RationalVec& coords);

    std::size_t dim() const { return numerators_.size(); }
    const std::vector<Integer>& numerators() const { return numerators_; }
    const Integer& denominator() const { return denominator_; }

    Rational coord(std::size_t i) const;
    RationalVec coords() const;

    /// "p1/q,p2/q,..." with the shared denominator (not reduced per coordinate).
    std::string to_string() const;
    static RationalPoint parse(std::string_view text);

    friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
    /// Order by q, then lexicographically by p.
    friend std::strong_ordering operator<=>(const RationalPoint& a, const RationalPoint& b);

private:
    std::vector<Integer> numerators_;
    Integer denominator_{1};
};

Rational sup_dist(const RationalVec& x, const RationalVec& y);

}  // namespace badapprox
