#pragma once

// The nested cube grids C_n of [0,1]^d.
//
// Level n has t * M^{n(d+1)} cubes per axis, side t^{-1} M^{-n(d+1)} =
// t^{-1} N^{-n(d+1)/d} with N = M^d. Cubes are half-open [lo, hi) per axis,
// except that a face lying on the top boundary of [0,1]^d is closed, so each
// level partitions the unit cube.

#include "badapprox/power_radius.hpp"
#include "badapprox/rational.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace badapprox {

using IndexVec = std::vector<Integer>;

struct GridCube {
    unsigned level = 0;
    IndexVec index;

    std::size_t dim() const { return index.size(); }
    friend bool operator==(const GridCube&, const GridCube&) = default;
    friend std::strong_ordering operator<=>(const GridCube& a, const GridCube& b);
    std::string to_string() const;
};

/// Closed axis-aligned box.
struct Box {
    RationalVec lo;
    RationalVec hi;

    std::size_t dim() const { return lo.size(); }
    Rational volume() const;
    bool empty() const;
    Box intersect(const Box& other) const;
};

class Grid {
public:
    Grid(unsigned d, Integer t, Integer m);

    unsigned d() const { return d_; }
    const Integer& t() const { return t_; }
    const Integer& m() const { return m_; }
    /// N = M^d.
    Integer n() const;

    Integer cells_per_axis(unsigned level) const;
    Rational side(unsigned level) const;
    Rational volume(unsigned level) const;
    /// Per-axis refinement factor between two levels (M^{(d+1)(to-from)}).
    Integer axis_factor(unsigned from, unsigned to) const;

    bool valid(const GridCube& c) const;
    Box closed_box(const GridCube& c) const;
    RationalVec center(const GridCube& c) const;

    /// Half-open membership with the top boundary of [0,1]^d closed.
    bool contains(const GridCube& c, const RationalVec& x) const;
    /// The unique level-`level` cube holding x in [0,1]^d.
    GridCube cube_containing(const RationalVec& x, unsigned level) const;
    GridCube ancestor(const GridCube& c, unsigned level) const;
    /// `inner` at a deeper level lies inside `outer`.
    bool is_inside(const GridCube& inner, const GridCube& outer) const;

    /// Children at level+1: axis_factor^d cubes, lexicographic order.
    std::vector<GridCube> subdivide(const GridCube& c) const;
    /// Every descendant of c at `level`, lexicographic order.
    void for_each_descendant(const GridCube& c, unsigned level,
                             const std::function<void(const GridCube&)>& fn) const;
    Integer descendant_count(const GridCube& c, unsigned level) const;

    /// Cubes at `level` whose closed box lies within sup-distance `reach`
    /// (inclusive) of the closed box `b`, clipped to the unit cube.
    void for_each_near(const Box& b, const Rational& reach, unsigned level,
                       const std::function<void(const GridCube&)>& fn) const;

    /// Whether a level-`level` cube can lie on the boundary of an ancestor.
    bool touches_boundary_of(const GridCube& inner, const GridCube& outer) const;

private:
    unsigned d_;
    Integer t_;
    Integer m_;
};

/// Sup-distance from x to a closed box (0 inside).
Rational dist_point_box(const RationalVec& x, const Box& b);
/// Sup-distance between two closed boxes.
Rational dist_box_box(const Box& a, const Box& b);

/// The open sup-norm ball B(center, r) meets the (half-open) cube.
bool ball_meets_box(const RationalVec& center, const PowerRadius& r, const Box& closed);
/// Half-open cube [lo,hi) lies inside the open ball B(center, r).
bool box_inside_ball(const Box& closed, const RationalVec& center, const PowerRadius& r);
/// Open ball B(center, r) lies inside the half-open cube.
bool ball_inside_box(const RationalVec& center, const PowerRadius& r, const Box& closed);

/// Calls fn for every integer vector with lo_i <= v_i <= hi_i (lexicographic).
void for_each_index(const IndexVec& lo, const IndexVec& hi, const std::function<void(const IndexVec&)>& fn);

}  // namespace badapprox
