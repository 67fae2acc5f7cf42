#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "cpd/rng.hpp"
#include "cpd/search/common.hpp"

namespace cpd {

namespace detail {

struct SplitScan {
    bool valid = false;
    int tau = -1;
    double gain = -std::numeric_limits<double>::infinity();
};

// Best interior split of (seg.lo, seg.hi]: maximize
//   cost(seg) - cost(left) - cost(right)
// over tau with both sides >= delta_m; ties take the smallest tau.
inline SplitScan best_split(CachedCost& cost, const Interval& seg, int delta_m) {
    SplitScan r;
    if (seg.length() < 2 * delta_m) return r;
    const double parent = cost(seg);
    for (int tau = seg.lo + delta_m; tau <= seg.hi - delta_m; ++tau) {
        const double g = parent - cost({seg.lo, tau}) - cost({tau, seg.hi});
        if (!r.valid || g > r.gain) {
            r.valid = true;
            r.gain = g;
            r.tau = tau;
        }
    }
    return r;
}

inline Segmentation finalize_partition(CachedCost& cost, std::vector<int> cps, int n,
                                       const DiagTimer& timer) {
    std::sort(cps.begin(), cps.end());
    Segmentation seg;
    seg.changepoints = std::move(cps);
    for (const auto& piece : segments_of(seg.changepoints, n)) {
        const double c = cost(piece);
        seg.per_segment_costs.push_back(c);
        seg.total_cost += c;
    }
    seg.diag = timer.finish();
    return seg;
}

}  // namespace detail

// Greedy binary segmentation: repeatedly split the segment whose best split
// has the largest gain.  K acts as a split budget; with `threshold` set,
// splitting continues while the best gain is >= threshold instead.
inline Segmentation bs_search(CostOracle& oracle, int n, const SearchConfig& cfg) {
    const int dm = cfg.delta_m;
    if (dm < 1) throw std::invalid_argument("bs: delta_m must be >= 1");
    if (n < dm) throw std::invalid_argument("bs: n shorter than delta_m");
    if (!cfg.threshold && cfg.K < 0) throw std::invalid_argument("bs: K must be >= 0");

    const detail::DiagTimer timer(oracle);
    detail::CachedCost cost(oracle);

    struct Leaf {
        Interval seg;
        detail::SplitScan split;
    };
    std::vector<Leaf> leaves{{Interval{0, n}, detail::best_split(cost, {0, n}, dm)}};
    std::vector<int> cps;

    while (cfg.threshold || static_cast<int>(cps.size()) < cfg.K) {
        int pick = -1;
        for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
            const auto& leaf = leaves[static_cast<std::size_t>(i)];
            if (!leaf.split.valid) continue;
            if (pick < 0 || leaf.split.gain > leaves[static_cast<std::size_t>(pick)].split.gain ||
                (leaf.split.gain == leaves[static_cast<std::size_t>(pick)].split.gain &&
                 leaf.seg.lo < leaves[static_cast<std::size_t>(pick)].seg.lo))
                pick = i;
        }
        if (pick < 0) break;
        const auto chosen = leaves[static_cast<std::size_t>(pick)];
        if (cfg.threshold && chosen.split.gain < *cfg.threshold) break;

        cps.push_back(chosen.split.tau);
        leaves.erase(leaves.begin() + pick);
        const Interval left{chosen.seg.lo, chosen.split.tau};
        const Interval right{chosen.split.tau, chosen.seg.hi};
        leaves.push_back({left, detail::best_split(cost, left, dm)});
        leaves.push_back({right, detail::best_split(cost, right, dm)});
    }
    return detail::finalize_partition(cost, std::move(cps), n, timer);
}

// Deterministic seeded interval system: layer k holds 2*ceil((1/a)^(k-1)) - 1
// evenly spaced intervals of length n * a^(k-1), clipped below at 2*delta_m.
inline std::vector<Interval> seeded_intervals(int n, double decay_a, int delta_m) {
    if (!(decay_a > 0.0 && decay_a < 1.0))
        throw std::invalid_argument("seedbs: decay must lie in (0, 1)");
    if (delta_m < 1 || n < 1) throw std::invalid_argument("seedbs: bad n or delta_m");

    const double ratio = static_cast<double>(n) / (2.0 * delta_m);
    int layers = 1;
    if (ratio > 1.0)
        layers = static_cast<int>(std::ceil(std::log(ratio) / std::log(1.0 / decay_a) - 1e-9)) + 1;

    std::vector<Interval> out;
    std::unordered_set<Interval, IntervalHash> seen;
    for (int k = 1; k <= layers; ++k) {
        const double raw_len = n * std::pow(decay_a, k - 1);
        const double len = std::max(raw_len, 2.0 * delta_m);
        const long long m =
            2 * static_cast<long long>(std::ceil(std::pow(1.0 / decay_a, k - 1) - 1e-9)) - 1;
        for (long long i = 1; i <= m; ++i) {
            const double x = m == 1 ? 0.0
                                    : static_cast<double>(i - 1) * (n - len) / (m - 1);
            int lo = static_cast<int>(std::llround(x));
            int hi = static_cast<int>(std::llround(x + len));
            lo = std::max(lo, 0);
            hi = std::min(hi, n);
            if (lo >= hi) continue;
            const Interval iv{lo, hi};
            if (seen.insert(iv).second) out.push_back(iv);
        }
    }
    return out;
}

namespace detail {

// Shared engine for the interval-sampled segmentation searches: each candidate
// interval is scanned once; accepted changepoints invalidate candidates they
// fall strictly inside, which confines survivors to current segments and so
// preserves delta_m spacing against all accepted boundaries.
inline Segmentation candidate_greedy(CostOracle& oracle, int n, const SearchConfig& cfg,
                                     const std::vector<Interval>& candidates) {
    const int dm = cfg.delta_m;
    const DiagTimer timer(oracle);
    CachedCost cost(oracle);

    struct Candidate {
        Interval seg;
        SplitScan split;
        bool alive = true;
    };
    std::vector<Candidate> cands;
    cands.reserve(candidates.size());
    for (const auto& c : candidates) cands.push_back({c, best_split(cost, c, dm), true});

    std::vector<int> cps;
    while (cfg.threshold || static_cast<int>(cps.size()) < cfg.K) {
        int pick = -1;
        for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
            const auto& c = cands[static_cast<std::size_t>(i)];
            if (!c.alive || !c.split.valid) continue;
            if (pick < 0) {
                pick = i;
                continue;
            }
            const auto& best = cands[static_cast<std::size_t>(pick)];
            if (c.split.gain > best.split.gain ||
                (c.split.gain == best.split.gain &&
                 (c.seg.lo < best.seg.lo ||
                  (c.seg.lo == best.seg.lo && c.seg.hi < best.seg.hi))))
                pick = i;
        }
        if (pick < 0) break;
        auto& chosen = cands[static_cast<std::size_t>(pick)];
        if (cfg.threshold && chosen.split.gain < *cfg.threshold) break;

        const int tau = chosen.split.tau;
        cps.push_back(tau);
        for (auto& c : cands)
            if (c.alive && c.seg.lo < tau && tau < c.seg.hi) c.alive = false;
    }
    return finalize_partition(cost, std::move(cps), n, timer);
}

}  // namespace detail

// Wild binary segmentation: M random intervals (plus the full one) are scanned
// once each; the best surviving split is accepted greedily.
inline Segmentation wbs_search(CostOracle& oracle, int n, const SearchConfig& cfg) {
    const int dm = cfg.delta_m;
    if (dm < 1) throw std::invalid_argument("wbs: delta_m must be >= 1");
    if (n < dm) throw std::invalid_argument("wbs: n shorter than delta_m");
    if (cfg.M < 1) throw std::invalid_argument("wbs: M must be >= 1");

    std::vector<Interval> candidates{{0, n}};
    Rng rng(cfg.seed);
    for (int d = 0; d < cfg.M; ++d) {
        for (int attempt = 0; attempt < 10'000; ++attempt) {
            const int lo = rng.uniform_int(0, n);
            const int hi = rng.uniform_int(0, n);
            if (lo < hi - 2 * dm) {
                candidates.push_back({lo, hi});
                break;
            }
        }
    }
    return detail::candidate_greedy(oracle, n, cfg, candidates);
}

// Seeded binary segmentation: WBS's greedy loop over the deterministic seeded
// interval system.
inline Segmentation seedbs_search(CostOracle& oracle, int n, const SearchConfig& cfg) {
    const int dm = cfg.delta_m;
    if (dm < 1) throw std::invalid_argument("seedbs: delta_m must be >= 1");
    if (n < dm) throw std::invalid_argument("seedbs: n shorter than delta_m");
    return detail::candidate_greedy(oracle, n, cfg,
                                    seeded_intervals(n, cfg.decay_a, dm));
}

}  // namespace cpd
