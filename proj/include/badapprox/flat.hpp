#pragma once

// Affine flats through rational points, and the small exact Chebyshev
// linear programs used to measure sup-norm distance to them.

#include "badapprox/grid.hpp"
#include "badapprox/power_radius.hpp"
#include "badapprox/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace badapprox {

/// base + span(directions). Directions are kept in reduced row echelon form,
/// so they are linearly independent and the representation is canonical.
class AffineFlat {
public:
    AffineFlat() = default;
    AffineFlat(RationalVec base, std::vector<RationalVec> directions);

    std::size_t ambient_dim() const { return base_.size(); }
    std::size_t dim() const { return directions_.size(); }
    const RationalVec& base() const { return base_; }
    const std::vector<RationalVec>& directions() const { return directions_; }

    RationalVec at(const RationalVec& coeffs) const;
    bool contains(const RationalVec& x) const;

    friend bool operator==(const AffineFlat&, const AffineFlat&) = default;

private:
    RationalVec base_;
    std::vector<RationalVec> directions_;
    std::vector<std::size_t> pivots_;
};

/// Reduced row echelon form of the rows; zero rows dropped.
std::vector<RationalVec> row_reduce(std::vector<RationalVec> rows, std::vector<std::size_t>* pivots = nullptr);

/// Minimal affine flat containing every point (non-empty input).
AffineFlat affine_hull(const std::vector<RationalVec>& points);

/// inf over a in L of |x - a|_inf.
Rational dist_to_flat(const RationalVec& x, const AffineFlat& flat);

/// min |x - a|_inf over x in `box` and a in flat ∩ `clip`;
/// nullopt when flat ∩ clip is empty.
std::optional<Rational> dist_box_to_flat_piece(const Box& box, const AffineFlat& flat, const Box& clip);

/// The closed delta-thickening of the flat piece L ∩ closure(host) meets the
/// closure of cube I.
bool cube_meets_thickening(const Grid& grid, const GridCube& cube, const AffineFlat& flat,
                           const GridCube& host, const PowerRadius& delta);

struct LpSolution {
    Rational value;
    RationalVec point;
};

/// minimize c.y subject to A y <= b, by exact vertex enumeration.
/// Requires a pointed feasible region with the objective bounded below.
/// nullopt when infeasible.
std::optional<LpSolution> solve_lp_vertices(const std::vector<RationalVec>& a, const RationalVec& b,
                                            const RationalVec& c);

/// Solves the square system M y = rhs; nullopt when singular.
std::optional<RationalVec> solve_square(std::vector<RationalVec> m, RationalVec rhs);

}  // namespace badapprox
