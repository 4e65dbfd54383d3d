#include "badapprox/grid.hpp"

#include "badapprox/errors.hpp"

#include <stdexcept>

namespace badapprox {

std::strong_ordering operator<=>(const GridCube& a, const GridCube& b) {
    if (a.level != b.level) return a.level <=> b.level;
    const std::size_t n = std::min(a.index.size(), b.index.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = cmp(a.index[i], b.index[i]); c != 0)
            return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return a.index.size() <=> b.index.size();
}

std::string GridCube::to_string() const {
    std::string out = "L" + std::to_string(level) + "[";
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (i) out += ",";
        out += index[i].get_str();
    }
    return out + "]";
}

Rational Box::volume() const {
    Rational v = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= (hi[i] - lo[i]);
    return v;
}

bool Box::empty() const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) return true;
    return false;
}

Box Box::intersect(const Box& other) const {
    if (dim() != other.dim()) throw DimensionMismatch(dim(), other.dim());
    Box out = *this;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (other.lo[i] > out.lo[i]) out.lo[i] = other.lo[i];
        if (other.hi[i] < out.hi[i]) out.hi[i] = other.hi[i];
    }
    return out;
}

Grid::Grid(unsigned d, Integer t, Integer m) : d_(d), t_(std::move(t)), m_(std::move(m)) {
    if (d_ < 1) throw InvalidParams("d >= 1 required");
    if (t_ < 1) throw InvalidParams("t >= 1 required");
    if (m_ < 2) throw InvalidParams("M >= 2 required");
}

Integer Grid::n() const { return pow(m_, d_); }

Integer Grid::cells_per_axis(unsigned level) const {
    return t_ * pow(m_, static_cast<unsigned long>(level) * (d_ + 1));
}

Rational Grid::side(unsigned level) const { return Rational(Integer(1), cells_per_axis(level)); }

Rational Grid::volume(unsigned level) const { return pow(side(level), static_cast<long>(d_)); }

Integer Grid::axis_factor(unsigned from, unsigned to) const {
    if (to < from) throw std::invalid_argument("axis_factor: to < from");
    return pow(m_, static_cast<unsigned long>(to - from) * (d_ + 1));
}

bool Grid::valid(const GridCube& c) const {
    if (c.index.size() != d_) return false;
    const Integer cells = cells_per_axis(c.level);
    for (const auto& i : c.index)
        if (i < 0 || i >= cells) return false;
    return true;
}

Box Grid::closed_box(const GridCube& c) const {
    const Integer cells = cells_per_axis(c.level);
    Box b;
    b.lo.reserve(d_);
    b.hi.reserve(d_);
    for (const auto& i : c.index) {
        Rational lo(i, cells);
        Rational hi(i + 1, cells);
        lo.canonicalize();
        hi.canonicalize();
        b.lo.push_back(lo);
        b.hi.push_back(hi);
    }
    return b;
}

RationalVec Grid::center(const GridCube& c) const {
    const Integer cells = cells_per_axis(c.level);
    RationalVec out;
    for (const auto& i : c.index) {
        Rational v(2 * i + 1, 2 * cells);
        v.canonicalize();
        out.push_back(v);
    }
    return out;
}

bool Grid::contains(const GridCube& c, const RationalVec& x) const {
    if (x.size() != d_) throw DimensionMismatch(x.size(), d_);
    const Integer cells = cells_per_axis(c.level);
    for (std::size_t i = 0; i < d_; ++i) {
        Rational scaled = x[i] * cells;
        Integer k = floor(scaled);
        if (k == cells && scaled == cells) k = cells - 1;  // top face closed
        if (k != c.index[i]) return false;
    }
    return true;
}

GridCube Grid::cube_containing(const RationalVec& x, unsigned level) const {
    if (x.size() != d_) throw DimensionMismatch(x.size(), d_);
    const Integer cells = cells_per_axis(level);
    GridCube c{level, {}};
    c.index.reserve(d_);
    for (const auto& xi : x) {
        if (xi < 0 || xi > 1) throw std::domain_error("point outside [0,1]^d");
        Integer k = floor(Rational(xi * cells));
        if (k == cells) k = cells - 1;
        c.index.push_back(k);
    }
    return c;
}

GridCube Grid::ancestor(const GridCube& c, unsigned level) const {
    if (level > c.level) throw std::invalid_argument("ancestor level deeper than cube");
    const Integer f = axis_factor(level, c.level);
    GridCube a{level, {}};
    a.index.reserve(d_);
    for (const auto& i : c.index) {
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), i.get_mpz_t(), f.get_mpz_t());
        a.index.push_back(q);
    }
    return a;
}

bool Grid::is_inside(const GridCube& inner, const GridCube& outer) const {
    if (inner.level < outer.level) return false;
    return ancestor(inner, outer.level) == outer;
}

std::vector<GridCube> Grid::subdivide(const GridCube& c) const {
    std::vector<GridCube> out;
    for_each_descendant(c, c.level + 1, [&](const GridCube& child) { out.push_back(child); });
    return out;
}

void Grid::for_each_descendant(const GridCube& c, unsigned level,
                               const std::function<void(const GridCube&)>& fn) const {
    const Integer f = axis_factor(c.level, level);
    IndexVec lo, hi;
    for (const auto& i : c.index) {
        lo.push_back(i * f);
        hi.push_back(i * f + f - 1);
    }
    for_each_index(lo, hi, [&](const IndexVec& v) { fn(GridCube{level, v}); });
}

Integer Grid::descendant_count(const GridCube& c, unsigned level) const {
    return pow(axis_factor(c.level, level), d_);
}

void Grid::for_each_near(const Box& b, const Rational& reach, unsigned level,
                         const std::function<void(const GridCube&)>& fn) const {
    const Integer cells = cells_per_axis(level);
    IndexVec lo, hi;
    for (std::size_t i = 0; i < d_; ++i) {
        Integer a = ceil(Rational((b.lo[i] - reach) * cells)) - 1;
        Integer z = floor(Rational((b.hi[i] + reach) * cells));
        if (a < 0) a = 0;
        if (z > cells - 1) z = cells - 1;
        if (a > z) return;
        lo.push_back(a);
        hi.push_back(z);
    }
    for_each_index(lo, hi, [&](const IndexVec& v) {
        GridCube c{level, v};
        if (dist_box_box(closed_box(c), b) <= reach) fn(c);
    });
}

bool Grid::touches_boundary_of(const GridCube& inner, const GridCube& outer) const {
    const Box a = closed_box(inner);
    const Box b = closed_box(outer);
    for (std::size_t i = 0; i < d_; ++i)
        if (a.lo[i] == b.lo[i] || a.hi[i] == b.hi[i]) return true;
    return false;
}

Rational dist_point_box(const RationalVec& x, const Box& b) {
    if (x.size() != b.dim()) throw DimensionMismatch(x.size(), b.dim());
    Rational best = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < b.lo[i]) {
            Rational g = b.lo[i] - x[i];
            if (g > best) best = g;
        } else if (x[i] > b.hi[i]) {
            Rational g = x[i] - b.hi[i];
            if (g > best) best = g;
        }
    }
    return best;
}

Rational dist_box_box(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    Rational best = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a.hi[i] < b.lo[i]) {
            Rational g = b.lo[i] - a.hi[i];
            if (g > best) best = g;
        } else if (b.hi[i] < a.lo[i]) {
            Rational g = a.lo[i] - b.hi[i];
            if (g > best) best = g;
        }
    }
    return best;
}

bool ball_meets_box(const RationalVec& center, const PowerRadius& r, const Box& closed) {
    return less(dist_point_box(center, closed), r);
}

bool box_inside_ball(const Box& closed, const RationalVec& center, const PowerRadius& r) {
    for (std::size_t i = 0; i < center.size(); ++i) {
        if (!less(Rational(center[i] - closed.lo[i]), r)) return false;
        Rational up = closed.hi[i] - center[i];
        // A face on the top boundary of [0,1]^d is closed.
        if (closed.hi[i] == 1 ? !less(up, r) : !less_equal(up, r)) return false;
    }
    return true;
}

bool ball_inside_box(const RationalVec& center, const PowerRadius& r, const Box& closed) {
    for (std::size_t i = 0; i < center.size(); ++i) {
        if (cmp_power(Rational(center[i] - closed.lo[i]), r) < 0) return false;
        if (cmp_power(Rational(closed.hi[i] - center[i]), r) < 0) return false;
    }
    return true;
}

void for_each_index(const IndexVec& lo, const IndexVec& hi, const std::function<void(const IndexVec&)>& fn) {
    const std::size_t d = lo.size();
    for (std::size_t i = 0; i < d; ++i)
        if (lo[i] > hi[i]) return;
    IndexVec cur = lo;
    while (true) {
        fn(cur);
        std::size_t axis = d;
        while (axis > 0) {
            --axis;
            if (cur[axis] < hi[axis]) {
                ++cur[axis];
                for (std::size_t j = axis + 1; j < d; ++j) cur[j] = lo[j];
                break;
            }
            if (axis == 0) return;
        }
        if (d == 0) return;
    }
}

}  // namespace badapprox
