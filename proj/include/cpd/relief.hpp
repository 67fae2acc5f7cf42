#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "cpd/interval.hpp"
#include "cpd/rng.hpp"

namespace cpd {

// One geometric layer of the relief construction: n_k+1 intervals of real
// length `length`, spaced `shift` apart, centered on (0, n] via `offset`.
struct ReliefLayer {
    int k = 0;
    double length = 0.0;
    double shift = 0.0;
    double offset = 0.0;
    long long count = 0;  // valid intervals contributed before cross-layer dedup
};

// Deterministic pool of "relief" intervals.  Layer k holds intervals of length
//   l_k = b^k * delta_m / (1+w),  k = 0 .. floor(log_b((1+w) n / delta_m)),
// shifted by s_k = w * l_k and centered so the layer is symmetric in (0, n].
// Any search interval of length >= delta_m then contains a pool interval
// covering at least a 1/((1+w) b) fraction of it, so models fitted on the pool
// can stand in for models fitted on every search interval.
//
// Real-valued endpoints are rounded to the nearest integer (half away from
// zero), clipped to [0, n]; degenerate results are dropped and duplicates
// across layers are kept once, attributed to their first layer.
class ReliefPool {
public:
    static ReliefPool build(int n, int delta_m, double w, double b) {
        if (delta_m < 2) throw std::invalid_argument("relief: delta_m must be >= 2");
        if (n < delta_m) throw std::invalid_argument("relief: need n >= delta_m, no layer exists");
        if (!(w > 0.0)) throw std::invalid_argument("relief: w must be > 0");
        if (!(b > 1.0)) throw std::invalid_argument("relief: b must be > 1");

        ReliefPool pool;
        pool.n_ = n;
        pool.delta_m_ = delta_m;
        pool.w_ = w;
        pool.b_ = b;

        const double arg = (1.0 + w) * static_cast<double>(n) / delta_m;
        const int k_max = static_cast<int>(std::floor(std::log(arg) / std::log(b) + 1e-9));

        std::unordered_set<Interval, IntervalHash> seen;
        for (int k = 0; k <= k_max; ++k) {
            const double len = std::pow(b, k) * delta_m / (1.0 + w);
            const double shift = w * len;
            const long long nk =
                static_cast<long long>(std::floor((n - len) / shift + 1e-9));
            if (nk < 0) continue;
            const double offset = n / 2.0 - (len + static_cast<double>(nk) * shift) / 2.0;

            ReliefLayer layer{k, len, shift, offset, 0};
            for (long long q = 0; q <= nk; ++q) {
                const double x = static_cast<double>(q) * shift + offset;
                int lo = static_cast<int>(std::llround(x));
                int hi = static_cast<int>(std::llround(x + len));
                lo = std::max(lo, 0);
                hi = std::min(hi, n);
                if (lo >= hi) continue;
                ++layer.count;
                const Interval iv{lo, hi};
                if (seen.insert(iv).second) {
                    pool.intervals_.push_back(iv);
                    pool.interval_layer_.push_back(k);
                }
            }
            pool.layers_.push_back(layer);
        }
        pool.build_lookup();
        return pool;
    }

    // Coverage-targeted construction: 1+w = b = r^{-1/2} makes the guaranteed
    // covered fraction 1/((1+w) b) equal to r.
    static ReliefPool from_coverage(int n, int delta_m, double r) {
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("relief: coverage r must lie in (0, 1)");
        const double b = 1.0 / std::sqrt(r);
        return build(n, delta_m, b - 1.0, b);
    }

    int n() const { return n_; }
    int delta_m() const { return delta_m_; }
    double w() const { return w_; }
    double b() const { return b_; }
    std::size_t size() const { return intervals_.size(); }
    const std::vector<ReliefLayer>& layers() const { return layers_; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    int layer_of(std::size_t idx) const { return interval_layer_[idx]; }

    // upper bound |pool| <= c * n / delta_m from the geometric layer sum
    static double size_constant(double w, double b) {
        return (1.0 + w) * b / (w * (b - 1.0));
    }
    // fraction of any covered search interval guaranteed to be overlapped
    double coverage_bound() const { return 1.0 / ((1.0 + w_) * b_); }

    // Longest pool interval contained in I; ties broken by smallest lo.
    std::optional<Interval> best_relief(const Interval& I) const {
        auto it = std::upper_bound(lengths_.begin(), lengths_.end(), I.length());
        while (it != lengths_.begin()) {
            --it;
            const int len = *it;
            const auto& los = los_by_len_[static_cast<std::size_t>(it - lengths_.begin())];
            auto lo_it = std::lower_bound(los.begin(), los.end(), I.lo);
            if (lo_it != los.end() && *lo_it + len <= I.hi)
                return Interval{*lo_it, *lo_it + len};
        }
        return std::nullopt;
    }

    // Smallest covered fraction of I over intervals I with |I| >= min_len,
    // reported as the pool's realized coverage rate; exhaustive, so refuses to
    // run past `budget` enumerated intervals.
    double coverage_rate(int min_len, std::uint64_t budget = 4'000'000) const {
        if (min_len < 1 || min_len > n_)
            throw std::invalid_argument("relief: coverage min_len out of range");
        const std::uint64_t count = enumeration_count(min_len);
        if (count > budget)
            throw std::runtime_error("relief: coverage enumeration over budget");
        double worst = 1.0;
        for (int len = min_len; len <= n_; ++len) {
            for (int lo = 0; lo + len <= n_; ++lo) {
                const Interval I{lo, lo + len};
                const auto R = best_relief(I);
                if (!R) return 0.0;
                worst = std::min(worst, static_cast<double>(R->length()) / len);
            }
        }
        return worst;
    }

    // First interval of length >= min_len with no contained pool interval.
    // Exhaustive for n <= 2000, seeded sampling beyond that.
    std::optional<Interval> first_uncovered(int min_len) const {
        if (min_len < 1 || min_len > n_)
            throw std::invalid_argument("relief: min_len out of range");
        if (n_ <= 2000) {
            for (int len = min_len; len <= n_; ++len)
                for (int lo = 0; lo + len <= n_; ++lo)
                    if (!best_relief(Interval{lo, lo + len}))
                        return Interval{lo, lo + len};
            return std::nullopt;
        }
        Rng rng(0x9d2c5680u ^ static_cast<std::uint64_t>(n_));
        for (int trial = 0; trial < 10'000; ++trial) {
            const int len = rng.uniform_int(min_len, n_);
            const int lo = rng.uniform_int(0, n_ - len);
            if (!best_relief(Interval{lo, lo + len}))
                return Interval{lo, lo + len};
        }
        return std::nullopt;
    }

private:
    std::uint64_t enumeration_count(int min_len) const {
        std::uint64_t c = 0;
        for (int len = min_len; len <= n_; ++len) c += static_cast<std::uint64_t>(n_ - len + 1);
        return c;
    }

    void build_lookup() {
        std::vector<std::pair<int, int>> by_len;  // (length, lo)
        by_len.reserve(intervals_.size());
        for (const auto& iv : intervals_) by_len.emplace_back(iv.length(), iv.lo);
        std::sort(by_len.begin(), by_len.end());
        lengths_.clear();
        los_by_len_.clear();
        for (const auto& [len, lo] : by_len) {
            if (lengths_.empty() || lengths_.back() != len) {
                lengths_.push_back(len);
                los_by_len_.emplace_back();
            }
            los_by_len_.back().push_back(lo);
        }
    }

    int n_ = 0;
    int delta_m_ = 0;
    double w_ = 0.0;
    double b_ = 0.0;
    std::vector<ReliefLayer> layers_;
    std::vector<Interval> intervals_;
    std::vector<int> interval_layer_;
    std::vector<int> lengths_;                  // ascending distinct lengths
    std::vector<std::vector<int>> los_by_len_;  // sorted lo per length
};

}  // namespace cpd
