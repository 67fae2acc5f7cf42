#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cpd/interval.hpp"
#include "cpd/oracle.hpp"

namespace cpd {

struct SearchConfig {
    int delta_m = 1;                  // minimum segment length
    double gamma = 0.0;               // per-changepoint penalty (OP/PELT)
    int K = 0;                        // split budget / segment count target
    int M = 100;                      // WBS random interval count
    double decay_a = 0.7071067811865476;  // SeedBS layer decay
    std::uint64_t seed = 0;           // WBS RNG seed
    double prune_margin = 0.0;        // PELT pruning slack
    bool pruning_enabled = true;
    std::optional<double> threshold;  // BS-family stop rule; overrides K when set
};

struct SearchDiagnostics {
    std::uint64_t fits = 0;
    std::uint64_t evals = 0;
    double wall_ms = 0.0;
};

struct Segmentation {
    std::vector<int> changepoints;          // strictly increasing, in (0, n)
    double total_cost = 0.0;                // incl. gamma * #cps for OP/PELT
    std::vector<double> per_segment_costs;  // raw segment costs, left to right
    SearchDiagnostics diag;
};

inline std::vector<Interval> segments_of(const std::vector<int>& cps, int n) {
    std::vector<Interval> segs;
    int lo = 0;
    for (int c : cps) {
        segs.push_back({lo, c});
        lo = c;
    }
    segs.push_back({lo, n});
    return segs;
}

inline bool spacing_ok(const std::vector<int>& cps, int n, int delta_m) {
    int lo = 0;
    for (int c : cps) {
        if (c - lo < delta_m || c <= 0 || c >= n) return false;
        lo = c;
    }
    return n - lo >= delta_m;
}

namespace detail {

// Per-run memo so each distinct interval reaches the oracle once even when
// recursion revisits it (binary-segmentation children rescan parent prefixes).
class CachedCost {
public:
    explicit CachedCost(CostOracle& oracle) : oracle_(oracle) {}

    double operator()(const Interval& I) {
        const auto it = memo_.find(I);
        if (it != memo_.end()) return it->second;
        const double v = oracle_.cost(I);
        memo_.emplace(I, v);
        return v;
    }

private:
    CostOracle& oracle_;
    std::unordered_map<Interval, double, IntervalHash> memo_;
};

class DiagTimer {
public:
    explicit DiagTimer(const CostOracle& oracle)
        : oracle_(oracle), start_(oracle.counters()),
          t0_(std::chrono::steady_clock::now()) {}

    SearchDiagnostics finish() const {
        const auto t1 = std::chrono::steady_clock::now();
        const auto& now = oracle_.counters();
        SearchDiagnostics d;
        d.fits = now.fits - start_.fits;
        d.evals = now.evals - start_.evals;
        d.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0_).count();
        return d;
    }

private:
    const CostOracle& oracle_;
    OracleCounters start_;
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail
}  // namespace cpd
