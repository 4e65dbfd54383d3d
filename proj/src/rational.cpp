#include "badapprox/rational.hpp"

#include "badapprox/errors.hpp"

#include <stdexcept>

namespace badapprox {

std::string to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

Integer parse_integer(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty integer");
    Integer z;
    if (z.set_str(s, 10) != 0) throw std::invalid_argument("bad integer: " + s);
    return z;
}

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text));
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Integer floor(const Rational& r) {
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return out;
}

Integer ceil(const Rational& r) {
    Integer out;
    mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return out;
}

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

Integer pow(const Integer& base, unsigned long exp) {
    Integer out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

Rational pow(const Rational& base, long exp) {
    unsigned long e = exp < 0 ? static_cast<unsigned long>(-exp) : static_cast<unsigned long>(exp);
    Rational out(pow(base.get_num(), e), pow(base.get_den(), e));
    out.canonicalize();
    if (exp < 0) {
        if (out == 0) throw std::domain_error("zero to a negative power");
        out = 1 / out;
    }
    return out;
}

std::strong_ordering compare(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

RationalPoint::RationalPoint(std::vector<Integer> numerators, Integer denominator)
    : numerators_(std::move(numerators)), denominator_(std::move(denominator)) {
    if (denominator_ <= 0) throw std::invalid_argument("RationalPoint denominator must be positive");
    Integer g = denominator_;
    for (const auto& p : numerators_) g = gcd(g, p);
    if (g != 1) {
        for (auto& p : numerators_) p /= g;
        denominator_ /= g;
    }
}

RationalPoint RationalPoint::from_coords(const RationalVec& coords) {
    Integer q = 1;
    for (const auto& c : coords) q = lcm(q, c.get_den());
    std::vector<Integer> p;
    p.reserve(coords.size());
    for (const auto& c : coords) p.push_back(c.get_num() * (q / c.get_den()));
    return RationalPoint(std::move(p), q);
}

Rational RationalPoint::coord(std::size_t i) const {
    Rational r(numerators_.at(i), denominator_);
    r.canonicalize();
    return r;
}

RationalVec RationalPoint::coords() const {
    RationalVec out;
    out.reserve(dim());
    for (std::size_t i = 0; i < dim(); ++i) out.push_back(coord(i));
    return out;
}

std::string RationalPoint::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (i) out += ',';
        out += numerators_[i].get_str() + "/" + denominator_.get_str();
    }
    return out;
}

RationalPoint RationalPoint::parse(std::string_view text) {
    RationalVec coords;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        coords.push_back(parse_rational(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return from_coords(coords);
}

std::strong_ordering operator<=>(const RationalPoint& a, const RationalPoint& b) {
    if (int c = cmp(a.denominator_, b.denominator_); c != 0)
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    const std::size_t n = std::min(a.dim(), b.dim());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = cmp(a.numerators_[i], b.numerators_[i]); c != 0)
            return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return a.dim() <=> b.dim();
}

Rational sup_dist(const RationalVec& x, const RationalVec& y) {
    if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
    Rational best = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        Rational diff = abs(Rational(x[i] - y[i]));
        if (diff > best) best = diff;
    }
    return best;
}

}  // namespace badapprox
