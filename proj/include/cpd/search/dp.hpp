#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cpd/search/common.hpp"

namespace cpd {

namespace detail {

// Lazily filled (s, t) cost table for the segment-neighbourhood DP; each
// distinct interval costs one oracle call.
class CostTable {
public:
    CostTable(CostOracle& oracle, int n)
        : oracle_(oracle), n_(n),
          values_(static_cast<std::size_t>(n + 1) * (n + 1),
                  std::numeric_limits<double>::quiet_NaN()) {}

    double operator()(int s, int t) {
        double& slot = values_[static_cast<std::size_t>(s) * (n_ + 1) + t];
        if (std::isnan(slot)) slot = oracle_.cost({s, t});
        return slot;
    }

private:
    CostOracle& oracle_;
    int n_;
    std::vector<double> values_;
};

}  // namespace detail

// Segment-neighbourhood search: for every number of changepoints K = 0..K_max,
// the exactly optimal segmentation under the spacing constraint.  Returned
// vector is indexed by K.  Cost-value ties resolve to the smallest last
// changepoint at every DP state.
inline std::vector<Segmentation> sn_search(CostOracle& oracle, int n, int K_max,
                                           const SearchConfig& cfg) {
    const int dm = cfg.delta_m;
    if (dm < 1) throw std::invalid_argument("sn: delta_m must be >= 1");
    if (K_max < 0) throw std::invalid_argument("sn: K_max must be >= 0");
    if (n < (K_max + 1) * dm)
        throw std::invalid_argument("sn: n too short for K_max segments of delta_m");

    const detail::DiagTimer timer(oracle);
    detail::CostTable cost(oracle, n);
    const double inf = std::numeric_limits<double>::infinity();

    // F[k][t]: best cost of splitting (0, t] into k+1 segments
    std::vector<std::vector<double>> F(static_cast<std::size_t>(K_max) + 1,
                                       std::vector<double>(static_cast<std::size_t>(n) + 1, inf));
    std::vector<std::vector<int>> prev(static_cast<std::size_t>(K_max) + 1,
                                       std::vector<int>(static_cast<std::size_t>(n) + 1, -1));

    for (int t = dm; t <= n; ++t) F[0][t] = cost(0, t);
    for (int k = 1; k <= K_max; ++k) {
        for (int t = (k + 1) * dm; t <= n; ++t) {
            double best = inf;
            int arg = -1;
            for (int s = k * dm; s <= t - dm; ++s) {
                if (F[k - 1][s] == inf) continue;
                const double v = F[k - 1][s] + cost(s, t);
                if (v < best) {
                    best = v;
                    arg = s;
                }
            }
            F[k][t] = best;
            prev[k][t] = arg;
        }
    }

    std::vector<Segmentation> out;
    for (int K = 0; K <= K_max; ++K) {
        Segmentation seg;
        int t = n;
        for (int k = K; k >= 1; --k) {
            const int s = prev[k][t];
            seg.changepoints.push_back(s);
            t = s;
        }
        std::reverse(seg.changepoints.begin(), seg.changepoints.end());
        seg.total_cost = F[K][n];
        for (const auto& piece : segments_of(seg.changepoints, n))
            seg.per_segment_costs.push_back(cost(piece.lo, piece.hi));
        seg.diag = timer.finish();
        out.push_back(std::move(seg));
    }
    return out;
}

namespace detail {

inline Segmentation penalized_dp(CostOracle& oracle, int n, const SearchConfig& cfg,
                                 bool pruning) {
    const int dm = cfg.delta_m;
    if (dm < 1) throw std::invalid_argument("op: delta_m must be >= 1");
    if (n < dm) throw std::invalid_argument("op: n shorter than delta_m");

    const DiagTimer timer(oracle);
    const double inf = std::numeric_limits<double>::infinity();
    const double gamma = cfg.gamma;

    // F[t]: best penalized cost of (0, t]; F[0] = -gamma cancels the first
    // segment's penalty so that F[n] = total cost + gamma * #changepoints
    std::vector<double> F(static_cast<std::size_t>(n) + 1, inf);
    std::vector<int> prev(static_cast<std::size_t>(n) + 1, -1);
    std::vector<int> ncps(static_cast<std::size_t>(n) + 1, 0);
    F[0] = -gamma;

    std::vector<int> cand{0};
    std::vector<int> keep;
    std::vector<double> partial(static_cast<std::size_t>(n) + 1, 0.0);

    for (int t = dm; t <= n; ++t) {
        double best = inf;
        int arg = -1;
        int best_k = 0;
        for (int s : cand) {
            if (s > t - dm) continue;
            const double v = F[s] + oracle.cost({s, t}) + gamma;
            partial[static_cast<std::size_t>(s)] = v;
            const int k = ncps[static_cast<std::size_t>(s)] + (s > 0 ? 1 : 0);
            // ties: fewest changepoints, then smallest last changepoint
            // (candidates arrive in ascending order)
            if (v < best || (v == best && k < best_k)) {
                best = v;
                arg = s;
                best_k = k;
            }
        }
        F[t] = best;
        prev[t] = arg;
        ncps[static_cast<std::size_t>(t)] = best_k;

        if (pruning && best < inf) {
            keep.clear();
            for (int s : cand) {
                if (s > t - dm || partial[static_cast<std::size_t>(s)] - gamma +
                                          cfg.prune_margin <
                                      F[t])
                    keep.push_back(s);
            }
            cand.swap(keep);
        }
        if (F[t] < inf) cand.push_back(t);
    }

    if (F[n] == inf) throw std::runtime_error("op: no feasible segmentation");

    Segmentation seg;
    for (int t = n; t > 0;) {
        const int s = prev[t];
        if (s > 0) seg.changepoints.push_back(s);
        t = s;
    }
    std::reverse(seg.changepoints.begin(), seg.changepoints.end());
    seg.total_cost = F[n];
    for (const auto& piece : segments_of(seg.changepoints, n))
        seg.per_segment_costs.push_back(oracle.cost(piece));
    seg.diag = timer.finish();
    return seg;
}

}  // namespace detail

// Optimal partitioning: global minimum of sum of segment costs + gamma per
// changepoint.
inline Segmentation op_search(CostOracle& oracle, int n, const SearchConfig& cfg) {
    return detail::penalized_dp(oracle, n, cfg, /*pruning=*/false);
}

// OP with PELT candidate pruning.  A candidate s is dropped once
// F(s) + cost((s,t]) + prune_margin >= F(t); with margin 0 this is exact for
// subadditive families (mean), and `pruning_enabled = false` runs the very
// same code path as op_search.
inline Segmentation pelt_search(CostOracle& oracle, int n, const SearchConfig& cfg) {
    return detail::penalized_dp(oracle, n, cfg, cfg.pruning_enabled);
}

}  // namespace cpd
