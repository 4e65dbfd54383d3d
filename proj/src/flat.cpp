#include "badapprox/flat.hpp"

#include "badapprox/errors.hpp"

#include <stdexcept>

namespace badapprox {

std::vector<RationalVec> row_reduce(std::vector<RationalVec> rows, std::vector<std::size_t>* pivots) {
    if (pivots) pivots->clear();
    if (rows.empty()) return rows;
    const std::size_t cols = rows.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        const Rational lead = rows[r][c];
        for (auto& v : rows[r]) v /= lead;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const Rational f = rows[i][c];
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        if (pivots) pivots->push_back(c);
        ++r;
    }
    rows.resize(r);
    return rows;
}

AffineFlat::AffineFlat(RationalVec base, std::vector<RationalVec> directions) : base_(std::move(base)) {
    for (const auto& v : directions)
        if (v.size() != base_.size()) throw DimensionMismatch(v.size(), base_.size());
    const std::size_t given = directions.size();
    directions_ = row_reduce(std::move(directions), &pivots_);
    if (directions_.size() != given) throw std::invalid_argument("AffineFlat: degenerate direction set");
}

RationalVec AffineFlat::at(const RationalVec& coeffs) const {
    RationalVec out = base_;
    for (std::size_t j = 0; j < directions_.size(); ++j)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeffs[j] * directions_[j][i];
    return out;
}

bool AffineFlat::contains(const RationalVec& x) const {
    if (x.size() != base_.size()) throw DimensionMismatch(x.size(), base_.size());
    RationalVec residual(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) residual[i] = x[i] - base_[i];
    // Directions are in RREF: the coefficient of direction j is read off its pivot column.
    for (std::size_t j = 0; j < directions_.size(); ++j) {
        const Rational coef = residual[pivots_[j]];
        if (coef == 0) continue;
        for (std::size_t i = 0; i < x.size(); ++i) residual[i] -= coef * directions_[j][i];
    }
    for (const auto& v : residual)
        if (v != 0) return false;
    return true;
}

AffineFlat affine_hull(const std::vector<RationalVec>& points) {
    if (points.empty()) throw std::invalid_argument("affine_hull of no points");
    const RationalVec& p0 = points.front();
    std::vector<RationalVec> diffs;
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (points[k].size() != p0.size()) throw DimensionMismatch(points[k].size(), p0.size());
        RationalVec v(p0.size());
        for (std::size_t i = 0; i < p0.size(); ++i) v[i] = points[k][i] - p0[i];
        diffs.push_back(std::move(v));
    }
    return AffineFlat(p0, row_reduce(std::move(diffs)));
}

std::optional<RationalVec> solve_square(std::vector<RationalVec> m, RationalVec rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(m[c], m[piv]);
        std::swap(rhs[c], rhs[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            const Rational f = m[r][c] / m[c][c];
            for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
            rhs[r] -= f * rhs[c];
        }
    }
    RationalVec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rhs[i] / m[i][i];
    return y;
}

std::optional<LpSolution> solve_lp_vertices(const std::vector<RationalVec>& a, const RationalVec& b,
                                            const RationalVec& c) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    if (b.size() != m) throw DimensionMismatch(b.size(), m);
    if (n == 0 || m < n) return std::nullopt;

    std::optional<LpSolution> best;
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    while (true) {
        std::vector<RationalVec> sys;
        RationalVec rhs;
        for (auto k : pick) {
            sys.push_back(a[k]);
            rhs.push_back(b[k]);
        }
        if (auto y = solve_square(std::move(sys), std::move(rhs))) {
            bool feasible = true;
            for (std::size_t k = 0; k < m && feasible; ++k) {
                Rational lhs = 0;
                for (std::size_t j = 0; j < n; ++j) lhs += a[k][j] * (*y)[j];
                feasible = lhs <= b[k];
            }
            if (feasible) {
                Rational val = 0;
                for (std::size_t j = 0; j < n; ++j) val += c[j] * (*y)[j];
                if (!best || val < best->value) best = LpSolution{val, *y};
            }
        }
        // Next n-subset of {0..m-1} in lexicographic order.
        std::size_t i = n;
        while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

namespace {

// Rows for  s >= +-(x_i - a_i(lambda))  in variables (lambda_1..lambda_k, s), where
// x is a fixed point. Appended to (a, b) in the form row.y <= rhs.
void add_point_rows(const RationalVec& x, const AffineFlat& flat, std::vector<RationalVec>& a, RationalVec& b) {
    const std::size_t d = flat.ambient_dim();
    const std::size_t k = flat.dim();
    for (std::size_t i = 0; i < d; ++i) {
        // x_i - base_i - sum lambda_j dir_ji <= s   ->  -sum dir_ji lambda_j - s <= base_i - x_i
        RationalVec up(k + 1), down(k + 1);
        for (std::size_t j = 0; j < k; ++j) {
            up[j] = -flat.directions()[j][i];
            down[j] = flat.directions()[j][i];
        }
        up[k] = -1;
        down[k] = -1;
        a.push_back(up);
        b.push_back(flat.base()[i] - x[i]);
        a.push_back(down);
        b.push_back(x[i] - flat.base()[i]);
    }
}

}  // namespace

Rational dist_to_flat(const RationalVec& x, const AffineFlat& flat) {
    if (x.size() != flat.ambient_dim()) throw DimensionMismatch(x.size(), flat.ambient_dim());
    if (flat.dim() == 0) return sup_dist(x, flat.base());
    std::vector<RationalVec> a;
    RationalVec b;
    add_point_rows(x, flat, a, b);
    RationalVec c(flat.dim() + 1);
    c[flat.dim()] = 1;
    auto sol = solve_lp_vertices(a, b, c);
    if (!sol) throw std::logic_error("dist_to_flat: LP infeasible");
    return sol->value;
}

std::optional<Rational> dist_box_to_flat_piece(const Box& box, const AffineFlat& flat, const Box& clip) {
    const std::size_t d = flat.ambient_dim();
    if (box.dim() != d || clip.dim() != d) throw DimensionMismatch(box.dim(), d);
    if (flat.dim() == 0) {
        const RationalVec& p = flat.base();
        for (std::size_t i = 0; i < d; ++i)
            if (p[i] < clip.lo[i] || p[i] > clip.hi[i]) return std::nullopt;
        return dist_point_box(p, box);
    }
    // Variables (lambda, s); a = base + D lambda.
    //   s >= box.lo_i - a_i,  s >= a_i - box.hi_i,  s >= 0,  clip.lo_i <= a_i <= clip.hi_i.
    const std::size_t k = flat.dim();
    std::vector<RationalVec> a;
    RationalVec b;
    for (std::size_t i = 0; i < d; ++i) {
        RationalVec r1(k + 1), r2(k + 1), r3(k + 1), r4(k + 1);
        for (std::size_t j = 0; j < k; ++j) {
            const Rational& dij = flat.directions()[j][i];
            r1[j] = -dij;  // box.lo_i - base_i - D lambda <= s
            r2[j] = dij;   // base_i + D lambda - box.hi_i <= s
            r3[j] = -dij;  // -(base_i + D lambda) <= -clip.lo_i
            r4[j] = dij;   //  base_i + D lambda <= clip.hi_i
        }
        r1[k] = -1;
        r2[k] = -1;
        a.push_back(r1);
        b.push_back(flat.base()[i] - box.lo[i]);
        a.push_back(r2);
        b.push_back(box.hi[i] - flat.base()[i]);
        a.push_back(r3);
        b.push_back(flat.base()[i] - clip.lo[i]);
        a.push_back(r4);
        b.push_back(clip.hi[i] - flat.base()[i]);
    }
    RationalVec nonneg(k + 1);
    nonneg[k] = -1;
    a.push_back(nonneg);
    b.push_back(0);
    RationalVec c(k + 1);
    c[k] = 1;
    auto sol = solve_lp_vertices(a, b, c);
    if (!sol) return std::nullopt;
    return sol->value;
}

bool cube_meets_thickening(const Grid& grid, const GridCube& cube, const AffineFlat& flat,
                           const GridCube& host, const PowerRadius& delta) {
    auto dist = dist_box_to_flat_piece(grid.closed_box(cube), flat, grid.closed_box(host));
    if (!dist) return false;
    return less_equal(*dist, delta);
}

}  // namespace badapprox
