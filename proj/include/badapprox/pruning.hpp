#pragma once

// The delayed-pruning Cantor set: hyperplane records per host cube, the
// starred families, and a lazy memoized survival oracle for S_{l(n)}.
//
// A level-l(n) cube I survives stage n when its level-l(n-1) ancestor
// survived stage n-1 (everything survives "stage 0") and I misses the closed
// delta(n)-thickening of every starred stage-n flat piece L ∩ closure(H).
// Since delta(n) is below the level-n side, only the 3^d level-n hosts around
// I's ancestor can reach I.

#include "badapprox/flat.hpp"
#include "badapprox/grid.hpp"
#include "badapprox/params.hpp"
#include "badapprox/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

namespace badapprox {

enum class Starred { Unresolved, Yes, No };

struct HyperplaneRecord {
    unsigned stage = 0;
    GridCube host;
    /// Affine hull of `rationals`; empty when the host holds none.
    std::optional<AffineFlat> flat;
    /// Canonical rationals with q < N^stage in the host, sorted.
    std::vector<RationalPoint> rationals;
    Starred starred = Starred::Unresolved;
    std::optional<RationalPoint> witness;
};

struct StageStats {
    std::uint64_t records = 0;
    std::uint64_t starred = 0;
    std::uint64_t survival_queries = 0;
    std::uint64_t removed = 0;
};

class PruningState {
public:
    explicit PruningState(ConstructionParams params);

    const ConstructionParams& params() const { return params_; }
    const Grid& grid() const { return grid_; }
    unsigned max_stage() const { return params_.max_stage; }
    /// Raises maxStage; memo contents stay valid.
    void deepen(unsigned max_stage);

    unsigned level(unsigned stage) const { return prune_level(params_, stage); }
    const ScheduleValue& schedule(unsigned stage) const;
    /// Stage n with l(n) == level, if any (n in 1..maxStage).
    std::optional<unsigned> stage_of_level(unsigned level) const;

    /// Record of a level-n host (n in 1..maxStage); computed once.
    const HyperplaneRecord& hyperplane_of(const GridCube& host);
    /// Resolves and caches starredness; stores the first witness found.
    bool is_starred(const GridCube& host);

    /// I at level l(n) for some n <= maxStage.
    bool survives(const GridCube& cube);
    /// I at level l(n) meets a starred stage-n thickening.
    bool removed_at_stage(const GridCube& cube, unsigned stage);

    /// First surviving level-l(stage) cube (lexicographic) meeting the open
    /// ball; stage 0 means the whole unit cube survives.
    std::optional<GridCube> first_survivor_meeting(const RationalVec& center, const PowerRadius& r,
                                                   unsigned stage);
    bool ball_meets_survivors(const RationalVec& center, const PowerRadius& r, unsigned stage) {
        return first_survivor_meeting(center, r, stage).has_value();
    }

    /// Visits every surviving level-l(stage) cube in lexicographic order,
    /// descending through survivors of earlier stages.
    /// Throws BudgetExceeded when more than `budget` cubes would be examined.
    void for_each_survivor(unsigned stage, const std::function<void(const GridCube&)>& fn);
    /// Surviving level-l(stage) descendants of `cube` (a cube at level <= l(stage)).
    void for_each_survivor_in(const GridCube& cube, unsigned stage, const std::function<void(const GridCube&)>& fn);
    std::uint64_t budget() const { return budget_; }
    void set_budget(std::uint64_t cubes) { budget_ = cubes; }

    // Checkpoint support.
    std::map<GridCube, HyperplaneRecord> records_snapshot() const;
    std::map<GridCube, bool> memo_snapshot() const;
    std::map<unsigned, StageStats> stats() const;
    /// Stages whose removals were fully enumerated, with the newly removed cubes.
    const std::map<unsigned, std::set<GridCube>>& enumerated_removals() const { return enumerated_; }
    void restore(std::map<GridCube, HyperplaneRecord> records, std::map<unsigned, std::set<GridCube>> enumerated);
    /// Marks stage as fully enumerated (build step).
    void record_enumeration(unsigned stage, std::set<GridCube> newly_removed);

private:
    enum class Fate : unsigned char { Survives, RemovedHere, RemovedEarlier };

    Fate compute_fate(const GridCube& cube, unsigned stage);
    bool resolve_starred(const HyperplaneRecord& rec, std::optional<RationalPoint>& witness);
    void check_stage(unsigned stage) const;

    ConstructionParams params_;
    Grid grid_;
    std::vector<ScheduleValue> schedule_;  // index = stage, 0..maxStage
    std::map<unsigned, unsigned> level_to_stage_;
    std::uint64_t budget_ = std::uint64_t{1} << 26;

    mutable std::mutex mu_;
    std::map<GridCube, HyperplaneRecord> records_;
    std::map<GridCube, Fate> memo_;
    std::map<unsigned, std::set<GridCube>> enumerated_;
};

// ---------------------------------------------------------------------------
// Measure certificates and lemma checks.

struct MeasureReport {
    unsigned stage = 0;
    std::optional<Rational> exact;  // nullopt when over budget
    Rational bound;                 // 1 - union bound of removals
    Rational closed_form_bound;           // 1 - 3 t^{-d} sum_{k<=n} N^{(d+1)(k-l(k))/d}
    std::optional<Integer> surviving_cubes;
    std::vector<Rational> removed_per_stage;  // union-bound tally per stage k <= n
    bool consistent() const;
};

/// Exact mode counts surviving cubes; bound mode sums, per starred record,
/// the measure of level-l(k) cubes meeting its thickening.
MeasureReport surviving_measure(PruningState& state, unsigned stage, bool exact = true);
/// Level-l(stage) cubes (anywhere) meeting the thickening of one record.
Integer removed_cube_count(PruningState& state, const HyperplaneRecord& rec);
/// 1 - 3 t^{-d} sum_{k=1}^{n} N^{(d+1)(k-l(k))/d}.
Rational closed_form_measure_bound(const ConstructionParams& p, unsigned stage);

struct LeadingRational {
    RationalPoint point;
    unsigned stage = 0;
    GridCube host;
};

/// A band rational on its host's starred flat whose delta(n)-ball meets
/// S_{l(n-1)}.
std::optional<LeadingRational> leading_of(PruningState& state, const RationalPoint& p);
/// All leading rationals at stages <= n, ordered by (stage, q, p).
std::vector<LeadingRational> leading_rationals(PruningState& state, unsigned stage);

struct AvoidanceViolation {
    RationalPoint point;
    GridCube cube;
};

struct AvoidanceReport {
    unsigned stage = 0;
    Integer q_cap;
    std::uint64_t rationals_checked = 0;
    std::vector<AvoidanceViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// For every canonical p/q in [0,1]^d with q <= qCap: the open ball
/// B(p/q, c_N q^{-(1+tau)}) misses every surviving level-l(n) cube.
AvoidanceReport check_dangerous_avoidance(PruningState& state, unsigned stage, const Integer& q_cap);

struct RetentionReport {
    GridCube cube;
    unsigned m = 0;
    unsigned n = 0;
    Rational ratio;  // lambda(I ∩ S_{l(n)}) / lambda(I)
    Rational bound;
    bool ok() const { return ratio >= bound; }
};

/// Bound 1 - 3(sum_{k=m+1}^{min(l(m),n)} N^{(l(m)-l(k))(d+1)/d} + sum_{k=l(m)+1}^{n} N^{(k-l(k))(d+1)/d}).
Rational retention_bound(const ConstructionParams& p, unsigned m, unsigned n);
RetentionReport check_cube_retention(PruningState& state, const GridCube& cube, unsigned m, unsigned n);

}  // namespace badapprox
