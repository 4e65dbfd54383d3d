#include "badapprox/enumerate.hpp"

#include "badapprox/errors.hpp"

#include <algorithm>

namespace badapprox {

namespace {

struct Frac {
    Integer p;
    Integer q;
    Rational value() const {
        Rational r(p, q);
        r.canonicalize();
        return r;
    }
};

// Largest v <= n with v = residue (mod m), 0 <= residue < m.
Integer largest_with_residue(const Integer& n, const Integer& residue, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), Integer(n - residue).get_mpz_t(), m.get_mpz_t());
    return n - r;
}

std::pair<Frac, Frac> neighbours_of_member(const Rational& x, const Integer& n) {
    const Integer& p = x.get_num();
    const Integer& q = x.get_den();
    if (q == 1) return {Frac{p * n - 1, n}, Frac{p * n + 1, n}};
    Integer inv;
    mpz_invert(inv.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    // p*b - a*q = 1 for the left neighbour, c*q - p*d = 1 for the right one.
    const Integer b = largest_with_residue(n, inv, q);
    Integer neg_inv = q - inv;
    if (neg_inv == q) neg_inv = 0;
    const Integer d = largest_with_residue(n, neg_inv, q);
    return {Frac{(p * b - 1) / q, b}, Frac{(p * d + 1) / q, d}};
}

// Stern-Brocot descent towards x (not in F_n), jumping runs of equal turns.
std::pair<Frac, Frac> neighbours_of_gap(const Rational& x, const Integer& n) {
    const Integer fl = floor(x);
    Frac l{fl, 1}, r{fl + 1, 1};
    while (true) {
        if (l.q + r.q > n) return {l, r};
        const Rational mediant(l.p + r.p, l.q + r.q);
        const Rational gap_l = x * l.q - l.p;  // > 0
        const Rational gap_r = r.p - x * r.q;  // > 0
        if (x < mediant) {
            // r <- (k l + r): stays right of x while k < gap_r / gap_l.
            Integer k = ceil(Rational(gap_r / gap_l)) - 1;
            Integer cap = (n - r.q) / l.q;
            if (cap < k) k = cap;
            r = Frac{r.p + k * l.p, r.q + k * l.q};
        } else {
            Integer k = ceil(Rational(gap_l / gap_r)) - 1;
            Integer cap = (n - l.q) / r.q;
            if (cap < k) k = cap;
            l = Frac{l.p + k * r.p, l.q + k * r.q};
        }
    }
}

bool above_lower(const Rational& x, const Rational& lo) { return x >= lo; }

bool below_upper(const Rational& x, const Rational& hi, BoxMode mode) {
    if (mode == BoxMode::Closed || hi == 1) return x <= hi;
    return x < hi;
}

void walk_line(const Rational& lo, const Rational& hi, const Integer& q_lo, const Integer& q_hi, BoxMode mode,
               const std::function<bool(const RationalPoint&)>& fn) {
    if (q_hi <= q_lo || q_hi <= 1 || lo > hi) return;
    const Integer n = q_hi - 1;
    Frac prev, cur;
    if (lo.get_den() <= n) {
        prev = neighbours_of_member(lo, n).first;
        cur = Frac{lo.get_num(), lo.get_den()};
    } else {
        std::tie(prev, cur) = neighbours_of_gap(lo, n);
    }
    while (true) {
        const Rational v = cur.value();
        if (!below_upper(v, hi, mode)) return;
        if (above_lower(v, lo) && cur.q >= q_lo) {
            if (!fn(RationalPoint({cur.p}, cur.q))) return;
        }
        const Integer k = (n + prev.q) / cur.q;
        Frac next{k * cur.p - prev.p, k * cur.q - prev.q};
        prev = std::move(cur);
        cur = std::move(next);
    }
}

void scan_grid(const Box& box, const Integer& q_lo, const Integer& q_hi, BoxMode mode,
               const std::function<bool(const RationalPoint&)>& fn) {
    const std::size_t d = box.dim();
    Integer q = q_lo < 1 ? Integer(1) : q_lo;
    for (; q < q_hi; ++q) {
        IndexVec lo(d), hi(d);
        bool empty = false;
        for (std::size_t i = 0; i < d && !empty; ++i) {
            lo[i] = ceil(Rational(box.lo[i] * q));
            const Rational top = box.hi[i] * q;
            hi[i] = (mode == BoxMode::Closed || box.hi[i] == 1) ? floor(top) : ceil(top) - 1;
            empty = lo[i] > hi[i];
        }
        if (empty) continue;
        bool stop = false;
        for_each_index(lo, hi, [&](const IndexVec& p) {
            if (stop) return;
            Integer g = q;
            for (const auto& pi : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), pi.get_mpz_t());
            if (g != 1) return;
            if (!fn(RationalPoint(p, q))) stop = true;
        });
        if (stop) return;
    }
}

}  // namespace

std::pair<Rational, Rational> farey_neighbours(const Rational& x, const Integer& n) {
    if (n < 1) throw std::invalid_argument("Farey order must be positive");
    auto [l, r] = x.get_den() <= n ? neighbours_of_member(x, n) : neighbours_of_gap(x, n);
    return {l.value(), r.value()};
}

void for_each_rational(const Box& box, const Integer& q_lo, const Integer& q_hi, BoxMode mode,
                       const std::function<bool(const RationalPoint&)>& fn) {
    if (box.lo.size() != box.hi.size()) throw DimensionMismatch(box.lo.size(), box.hi.size());
    if (box.dim() == 1) {
        walk_line(box.lo[0], box.hi[0], q_lo < 1 ? Integer(1) : q_lo, q_hi, mode, fn);
    } else {
        scan_grid(box, q_lo, q_hi, mode, fn);
    }
}

std::vector<RationalPoint> enumerate_rationals(const Box& box, const Integer& q_lo, const Integer& q_hi,
                                               BoxMode mode) {
    std::vector<RationalPoint> out;
    for_each_rational(box, q_lo, q_hi, mode, [&](const RationalPoint& p) {
        out.push_back(p);
        return true;
    });
    if (box.dim() == 1) std::sort(out.begin(), out.end());
    return out;
}

}  // namespace badapprox
