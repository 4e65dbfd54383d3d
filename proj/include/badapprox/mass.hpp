#pragma once

// The mass-carrying Cantor subset D(B): T_{G,I} covers by fat approximation
// balls, nesting cubes inside the shrunk balls, the layered tree E_n with
// exact masses, and the Hölder checks behind the mass distribution principle.

#include "badapprox/pruning.hpp"

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

namespace badapprox {

struct ApproxBall {
    RationalPoint center;
    unsigned stage = 0;

    /// 2 q^{-(d+1)/d}.
    PowerRadius fat_radius() const;
    /// q^{-(1+tau)}.
    PowerRadius shrunk_radius(const Rational& tau) const;
    /// 4^d q^{-(d+1)}, exactly rational.
    Rational fat_volume() const;
    /// (2 q^{-(1+tau)})^d.
    PowerRadius shrunk_volume(const Rational& tau) const;
};

struct CantorNode {
    std::optional<ApproxBall> ball;  // empty for the root, whose region is I_0
    int parent = -1;                 // index into the previous layer
    GridCube nested;
    Rational mass;
};

struct RejectedCandidate {
    RationalPoint center;
    std::size_t met;  // index of the kept ball it intersects
};

struct CoverRecord {
    std::size_t layer = 0;   // layer of the balls produced
    std::size_t parent = 0;  // index of the parent node in layer-1
    GridCube cube;
    Integer g;
    std::vector<ApproxBall> kept;
    std::vector<RejectedCandidate> rejected;
    Rational covered;  // sum of fat volumes
    Rational target;   // kappa_1 * lambda(I)
    Integer q_floor;   // no fraction of I other than the anchor has a smaller denominator
    Rational interior_ratio;  // lambda(interior survivors) / lambda(I)
    bool interior_ok = true;  // interior_ratio >= C_ret / 2
    std::uint64_t candidates = 0;
};

enum class GPolicy { Enforce, Report };

struct GChoice {
    Integer g;
    Integer g_a;  // fat radius below half the interior-cube side
    Integer g_b;  // 4 * shrunk radius below fat radius
    std::optional<Integer> g_c;  // Hölder headroom; nullopt when beyond budget
    bool c_enforced = true;
    bool c_satisfied = true;
    double c_log2_estimate = 0;  // log2 of the headroom threshold (diagnostic)
};

struct TreeConfig {
    RationalVec seed_center;
    Rational seed_radius;
    unsigned depth = 3;
    Rational epsilon{1, 10};
    GPolicy policy = GPolicy::Enforce;
    /// Candidates are searched for q < G * 2^max_doublings before CoverageShortfall.
    unsigned max_doublings = 24;
    /// Expected fractions per enumeration window.
    std::uint64_t window_chunk = 4096;
    /// Refuse a cover whose provable minimum number of balls exceeds this.
    std::uint64_t ball_budget = std::uint64_t{1} << 12;
    /// Refuse a layer whose provable minimum node count exceeds this.
    std::uint64_t node_budget = std::uint64_t{1} << 12;
};

struct CantorTree {
    ConstructionParams params;
    TreeConfig config;
    GridCube seed_cube;
    Rational kappa1;
    Rational retention;  // C_ret = 1 - eps_N partial sum
    std::vector<std::vector<CantorNode>> layers;  // layers[0] = {root}
    std::vector<GChoice> thresholds;              // thresholds[n-1] for layer n
    std::vector<CoverRecord> covers;
};

/// 1 - 3 t^{-d} sum_{k=1}^{64} N^{(d+1)(k-l(k))/d}.
Rational retention_constant(const ConstructionParams& p);
/// C_ret 5^{-d} / 4.
Rational kappa_one(const ConstructionParams& p);
/// C = 2^d t^d N^{(u-1)(1+tau)d}.
PowerRadius volume_constant(const ConstructionParams& p);

/// Surviving stage-(m+1) cubes inside I (I at level l(m)) that do not touch its boundary.
std::vector<GridCube> interior_subcubes(PruningState& state, const GridCube& cube);

struct CoverEstimate {
    Integer q_floor;
    Integer min_balls;  // kappa_1 lambda(I) / (largest admissible fat volume), rounded up
};

/// Every a/b != anchor satisfies |a/b - anchor| >= 1/(b q_anchor), so fractions
/// of I other than the anchor have b >= 1/(q_anchor * maxdist(anchor, I)).
CoverEstimate cover_estimate(const Grid& grid, const GridCube& cube, const std::optional<RationalPoint>& anchor,
                             const Integer& g, const Rational& kappa1);

/// Greedy largest-first disjoint selection of fat balls around leading
/// rationals with q >= G inside I; stops once kappa_1 lambda(I) is covered.
/// `anchor` is the rational whose shrunk ball holds I, if any.
CoverRecord t_gi_cover(PruningState& state, const GridCube& cube, const Integer& g, const Rational& kappa1,
                       const TreeConfig& cfg = {}, const std::optional<RationalPoint>& anchor = std::nullopt);

/// Smallest-index surviving level-l(n-1) cube meeting B(p/q, delta(n)); checks
/// it lies in B(p/q, q^{-(1+tau)}) and the volume ratio against C.
GridCube nest_cube(PruningState& state, const ApproxBall& ball);

GChoice choose_G(PruningState& state, const CantorTree& tree, std::size_t layer, GPolicy policy);

CantorTree build_tree(PruningState& state, const TreeConfig& cfg);

/// Keeps the layers completed before a failure.
struct TreeBuild {
    CantorTree tree;
    std::exception_ptr error;  // null when every layer was built
    std::string error_message;
    unsigned failed_layer = 0;
    bool complete() const { return !error; }
};

/// Seed errors still throw; failures while building layers are captured.
TreeBuild build_tree_partial(PruningState& state, const TreeConfig& cfg);

/// Open sup-norm ball F = B(center, radius).
struct ProbeBall {
    RationalVec center;
    Rational radius;
};

Rational mass_upper(const CantorTree& tree, const ProbeBall& f);

struct HolderViolation {
    std::string what;
    Rational mass;
    double log2_radius = 0;
};

struct HolderReport {
    PowerRadius k;
    PowerRadius k_prime;
    Rational exponent;  // s - epsilon
    std::uint64_t nodes_checked = 0;
    std::uint64_t samples_checked = 0;
    std::vector<HolderViolation> node_violations;
    std::vector<HolderViolation> sample_violations;
    bool ok() const { return node_violations.empty() && sample_violations.empty(); }
};

HolderReport check_holder(const CantorTree& tree, std::uint64_t samples = 500, std::uint64_t rng_seed = 1);

struct Certificate {
    Rational s;
    Rational lower_bound;  // s - epsilon
};

/// Refuses (throws) when the Hölder report has violations.
Certificate dimension_certificate(const CantorTree& tree, const HolderReport& report);

struct TreeCheck {
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Exact structural re-check of covers and tree: disjointness, containment,
/// coverage, 5r property, mass conservation, nesting chain, volume ratios.
TreeCheck verify_tree(PruningState& state, const CantorTree& tree);

/// Centers of the deepest layer.
std::vector<RationalVec> deepest_centers(const CantorTree& tree);

}  // namespace badapprox
