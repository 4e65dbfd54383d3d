#include "badapprox/pruning.hpp"

#include "badapprox/enumerate.hpp"
#include "badapprox/errors.hpp"

#include <string>

namespace badapprox {

PruningState::PruningState(ConstructionParams params)
    : params_(std::move(params)), grid_(params_.d, params_.t, params_.m) {
    params_.validate();
    deepen(params_.max_stage);
}

void PruningState::deepen(unsigned max_stage) {
    if (max_stage < params_.max_stage) throw std::invalid_argument("deepen cannot lower maxStage");
    std::lock_guard lock(mu_);
    params_.max_stage = max_stage;
    for (unsigned n = static_cast<unsigned>(schedule_.size()); n <= max_stage; ++n) {
        schedule_.push_back(badapprox::schedule(params_, n));
        if (n >= 1) level_to_stage_[schedule_.back().prune_level] = n;
    }
}

const ScheduleValue& PruningState::schedule(unsigned stage) const {
    if (stage >= schedule_.size()) throw StageOutOfRange("stage " + std::to_string(stage) + " beyond maxStage");
    return schedule_[stage];
}

std::optional<unsigned> PruningState::stage_of_level(unsigned level) const {
    auto it = level_to_stage_.find(level);
    if (it == level_to_stage_.end()) return std::nullopt;
    return it->second;
}

void PruningState::check_stage(unsigned stage) const {
    if (stage < 1 || stage > params_.max_stage)
        throw StageOutOfRange("stage " + std::to_string(stage) + " outside 1.." + std::to_string(params_.max_stage));
}

const HyperplaneRecord& PruningState::hyperplane_of(const GridCube& host) {
    {
        std::lock_guard lock(mu_);
        auto it = records_.find(host);
        if (it != records_.end()) return it->second;
    }
    const unsigned n = host.level;
    check_stage(n);
    if (!grid_.valid(host)) throw std::invalid_argument("invalid host cube " + host.to_string());

    HyperplaneRecord rec;
    rec.stage = n;
    rec.host = host;
    rec.rationals = enumerate_rationals(grid_.closed_box(host), 1, params_.n_pow(n));
    if (!rec.rationals.empty()) {
        std::vector<RationalVec> pts;
        pts.reserve(rec.rationals.size());
        for (const auto& r : rec.rationals) pts.push_back(r.coords());
        AffineFlat hull = affine_hull(pts);
        if (hull.dim() >= params_.d)
            throw SimplexViolation("rationals with q < N^" + std::to_string(n) + " in " + host.to_string() +
                                   " span dimension " + std::to_string(hull.dim()));
        rec.flat = std::move(hull);
    } else {
        rec.starred = Starred::No;
    }
    std::lock_guard lock(mu_);
    return records_.emplace(host, std::move(rec)).first->second;
}

bool PruningState::resolve_starred(const HyperplaneRecord& rec, std::optional<RationalPoint>& witness) {
    if (!rec.flat) return false;
    if (rec.stage == 1) {
        // S_{l(0)} is everything, and every rational with q < N lies in the band [1, N).
        witness = rec.rationals.front();
        return true;
    }
    const Integer band_lo = params_.n_pow(rec.stage - 1);
    const PowerRadius& r = schedule(rec.stage).delta;
    for (const auto& p : rec.rationals) {
        if (p.denominator() < band_lo) continue;
        if (ball_meets_survivors(p.coords(), r, rec.stage - 1)) {
            witness = p;
            return true;
        }
    }
    return false;
}

bool PruningState::is_starred(const GridCube& host) {
    const HyperplaneRecord& rec = hyperplane_of(host);
    {
        std::lock_guard lock(mu_);
        if (rec.starred != Starred::Unresolved) return rec.starred == Starred::Yes;
    }
    std::optional<RationalPoint> witness;
    const bool yes = resolve_starred(rec, witness);
    std::lock_guard lock(mu_);
    auto& stored = records_.at(host);
    stored.starred = yes ? Starred::Yes : Starred::No;
    stored.witness = witness;
    return yes;
}

bool PruningState::removed_at_stage(const GridCube& cube, unsigned stage) {
    check_stage(stage);
    const GridCube anchor = grid_.ancestor(cube, stage);
    const PowerRadius& r = schedule(stage).delta;
    IndexVec lo, hi;
    for (const auto& i : anchor.index) {
        lo.push_back(i - 1);
        hi.push_back(i + 1);
    }
    bool removed = false;
    for_each_index(lo, hi, [&](const IndexVec& idx) {
        if (removed) return;
        GridCube host{stage, idx};
        if (!grid_.valid(host)) return;
        const HyperplaneRecord& rec = hyperplane_of(host);
        if (!rec.flat) return;
        if (!cube_meets_thickening(grid_, cube, *rec.flat, host, r)) return;
        removed = is_starred(host);
    });
    return removed;
}

PruningState::Fate PruningState::compute_fate(const GridCube& cube, unsigned stage) {
    if (stage > 1) {
        const GridCube parent = grid_.ancestor(cube, level(stage - 1));
        if (!survives(parent)) return Fate::RemovedEarlier;
    }
    auto en = enumerated_.find(stage);
    if (en != enumerated_.end()) return en->second.count(cube) ? Fate::RemovedHere : Fate::Survives;
    return removed_at_stage(cube, stage) ? Fate::RemovedHere : Fate::Survives;
}

bool PruningState::survives(const GridCube& cube) {
    auto stage = stage_of_level(cube.level);
    if (!stage || *stage > params_.max_stage)
        throw StageOutOfRange("level " + std::to_string(cube.level) + " is not a pruning level l(n), n <= maxStage");
    {
        std::lock_guard lock(mu_);
        auto it = memo_.find(cube);
        if (it != memo_.end()) return it->second == Fate::Survives;
    }
    if (!grid_.valid(cube)) throw std::invalid_argument("invalid cube " + cube.to_string());
    const Fate fate = compute_fate(cube, *stage);
    std::lock_guard lock(mu_);
    memo_.emplace(cube, fate);
    return fate == Fate::Survives;
}

std::optional<GridCube> PruningState::first_survivor_meeting(const RationalVec& center, const PowerRadius& r,
                                                             unsigned stage) {
    if (stage > params_.max_stage) check_stage(stage);
    const unsigned lvl = level(stage);
    Box point{center, center};
    std::optional<GridCube> found;
    grid_.for_each_near(point, r.upper_bound(), lvl, [&](const GridCube& c) {
        if (found) return;
        if (!ball_meets_box(center, r, grid_.closed_box(c))) return;
        if (stage == 0 || survives(c)) found = c;
    });
    return found;
}

void PruningState::for_each_survivor_in(const GridCube& cube, unsigned stage,
                                        const std::function<void(const GridCube&)>& fn) {
    check_stage(stage);
    if (cube.level > level(stage)) throw std::invalid_argument("cube deeper than the requested stage");
    unsigned k = 1;
    while (level(k) < cube.level) ++k;
    std::uint64_t examined = 0;
    auto spend = [&](const Integer& count) {
        if (!count.fits_ulong_p() || examined + count.get_ui() > budget_)
            throw BudgetExceeded("survivor scan exceeds budget of " + std::to_string(budget_) + " cubes");
        examined += count.get_ui();
    };
    std::function<void(const GridCube&, unsigned)> descend = [&](const GridCube& c, unsigned s) {
        spend(grid_.descendant_count(c, level(s)));
        grid_.for_each_descendant(c, level(s), [&](const GridCube& child) {
            if (!survives(child)) return;
            if (s == stage) {
                fn(child);
            } else {
                descend(child, s + 1);
            }
        });
    };
    descend(cube, k);
}

void PruningState::for_each_survivor(unsigned stage, const std::function<void(const GridCube&)>& fn) {
    check_stage(stage);
    // The unit cube as a level-0 super-cube: iterate the t^d level-0 cubes.
    IndexVec lo(params_.d, Integer(0)), hi(params_.d, Integer(params_.t - 1));
    for_each_index(lo, hi, [&](const IndexVec& idx) { for_each_survivor_in(GridCube{0, idx}, stage, fn); });
}

std::map<GridCube, HyperplaneRecord> PruningState::records_snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::map<GridCube, bool> PruningState::memo_snapshot() const {
    std::lock_guard lock(mu_);
    std::map<GridCube, bool> out;
    for (const auto& [c, f] : memo_) out.emplace_hint(out.end(), c, f == Fate::Survives);
    return out;
}

std::map<unsigned, StageStats> PruningState::stats() const {
    std::lock_guard lock(mu_);
    std::map<unsigned, StageStats> out;
    for (const auto& [host, rec] : records_) {
        auto& s = out[rec.stage];
        ++s.records;
        if (rec.starred == Starred::Yes) ++s.starred;
    }
    for (const auto& [c, f] : memo_) {
        auto it = level_to_stage_.find(c.level);
        if (it == level_to_stage_.end()) continue;
        auto& s = out[it->second];
        ++s.survival_queries;
        if (f == Fate::RemovedHere) ++s.removed;
    }
    return out;
}

void PruningState::restore(std::map<GridCube, HyperplaneRecord> records,
                           std::map<unsigned, std::set<GridCube>> enumerated) {
    std::lock_guard lock(mu_);
    records_ = std::move(records);
    enumerated_ = std::move(enumerated);
    memo_.clear();
}

void PruningState::record_enumeration(unsigned stage, std::set<GridCube> newly_removed) {
    check_stage(stage);
    std::lock_guard lock(mu_);
    enumerated_[stage] = std::move(newly_removed);
}

}  // namespace badapprox
