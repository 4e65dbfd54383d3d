#pragma once

// Dense reference for the d = 1 construction with integer tau and M = N.
// Everything is enumerated: all rationals, all hosts, all cubes. Distances
// are compared by integer cross-multiplication; no library code is used.

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

using i128 = __int128;

struct LineParams {
    long tau = 2;
    long n = 2;  // N = M (d = 1)
    long t = 2;
    long u = 4;
};

inline long ipow(long b, long e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

struct LineRational {
    long p;
    long q;
};

class DenseLine {
public:
    DenseLine(LineParams prm, int stages) : prm_(prm) {
        level_.push_back(lev(0));
        surv_.push_back({});  // stage 0: everything
        for (int k = 1; k <= stages; ++k) build_stage(k);
    }

    long level(int k) const { return level_.at(k); }
    long cells(long lvl) const { return prm_.t * ipow(prm_.n, 2 * lvl); }
    /// delta(k) = 1 / delta_den(k).
    i128 delta_den(int k) const {
        i128 r = prm_.t;
        for (long i = 0; i < (k - 1 + prm_.u) * (1 + prm_.tau); ++i) r *= prm_.n;
        return r;
    }
    bool survives(int k, long idx) const { return surv_.at(k).at(idx); }
    long survivors(int k) const {
        long c = 0;
        for (bool b : surv_.at(k)) c += b;
        return c;
    }
    /// Host index (level k) -> its rational, for starred hosts.
    const std::map<long, LineRational>& starred(int k) const { return starred_.at(k); }
    /// Cubes at level l(k) within delta(k) of some starred stage-k point (union, anywhere).
    long removed_union(int k) const { return removed_union_.at(k); }
    /// Sum over starred points of the cubes each one removes.
    long removed_sum(int k) const { return removed_sum_.at(k); }

    /// All canonical p/q in [0,1] with q in [lo, hi).
    static std::vector<LineRational> rationals(long lo, long hi) {
        std::vector<LineRational> out;
        for (long q = std::max(1L, lo); q < hi; ++q)
            for (long p = 0; p <= q; ++p)
                if (std::gcd(p, q) == 1) out.push_back({p, q});
        return out;
    }

    /// closed-cube distance from p/q to cube idx at level lvl, compared with 1/den:
    /// returns sign(dist - 1/den).
    int cmp_dist(const LineRational& r, long lvl, long idx, i128 den) const {
        const i128 c = cells(lvl);
        // lo = idx/c, hi = (idx+1)/c; x = p/q.
        i128 num;  // dist * q * c
        if (i128(r.p) * c < i128(idx) * r.q) {
            num = i128(idx) * r.q - i128(r.p) * c;
        } else if (i128(r.p) * c > i128(idx + 1) * r.q) {
            num = i128(r.p) * c - i128(idx + 1) * r.q;
        } else {
            num = 0;
        }
        // dist vs 1/den  <=>  num * den vs q * c
        const i128 lhs = num * den, rhs = i128(r.q) * c;
        return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }

    long host_of(const LineRational& r, int k) const {
        const long c = cells(k);
        long idx = static_cast<long>(i128(r.p) * c / r.q);
        if (idx == c) idx = c - 1;
        return idx;
    }

private:
    long lev(int k) const { return ((k - 1 + prm_.u) * (1 + prm_.tau)) / 2; }

    void build_stage(int k) {
        level_.push_back(lev(k));
        const long lvl = level_[k];
        const long nk = ipow(prm_.n, k), nk1 = ipow(prm_.n, k - 1);
        const i128 dd = delta_den(k);

        std::map<long, std::vector<LineRational>> hosts;
        for (const auto& r : rationals(1, nk)) hosts[host_of(r, k)].push_back(r);

        std::map<long, LineRational> star;
        for (const auto& [h, rs] : hosts) {
            if (rs.size() > 1) throw std::logic_error("oracle: two rationals share a host in d = 1");
            const LineRational& r = rs.front();
            if (k == 1) {
                star[h] = r;
                continue;
            }
            if (r.q < nk1) continue;
            // open ball B(r, delta(k)) meets a surviving level-l(k-1) cube: dist < delta.
            const long prev = level_[k - 1];
            bool hit = false;
            for (long j = 0; j < cells(prev) && !hit; ++j)
                if (surv_[k - 1][j] && cmp_dist(r, prev, j, dd) < 0) hit = true;
            if (hit) star[h] = r;
        }
        starred_[k] = star;

        std::vector<bool> s(cells(lvl));
        long uni = 0, sum = 0;
        const long factor = cells(lvl) / cells(level_[k - 1]);
        for (long i = 0; i < cells(lvl); ++i) {
            bool removed = false;
            for (const auto& [h, r] : star) {
                if (cmp_dist(r, lvl, i, dd) <= 0) {
                    removed = true;
                    ++sum;
                }
            }
            uni += removed;
            const bool parent = k == 1 ? true : surv_[k - 1][i / factor];
            s[i] = parent && !removed;
        }
        surv_.push_back(std::move(s));
        removed_union_[k] = uni;
        removed_sum_[k] = sum;
    }

    LineParams prm_;
    std::vector<long> level_;
    std::vector<std::vector<bool>> surv_;
    std::map<int, std::map<long, LineRational>> starred_;
    std::map<int, long> removed_union_, removed_sum_;
};

}  // namespace oracle
