#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "cpd/data.hpp"
#include "cpd/interval.hpp"
#include "cpd/relief.hpp"

namespace cpd {

template <typename F>
concept ModelFamily = requires(const F f, const SeriesData& d, const Interval& I,
                               const typename F::model_type& m) {
    { f.fit(d, I) } -> std::convertible_to<typename F::model_type>;
    { f.loss(m, d, I) } -> std::convertible_to<double>;
};

struct OracleCounters {
    std::uint64_t fits = 0;
    std::uint64_t evals = 0;
};

class NoReliefError : public std::runtime_error {
public:
    explicit NoReliefError(const Interval& I)
        : std::runtime_error("no relief interval inside " + to_string(I)), interval(I) {}
    Interval interval;
};

// Segment-cost interface the search algorithms run against.  `evals` counts
// cost calls, `fits` counts actual model fits; the ratio is the whole point.
class CostOracle {
public:
    virtual ~CostOracle() = default;
    CostOracle(const CostOracle&) = delete;
    CostOracle& operator=(const CostOracle&) = delete;

    double cost(const Interval& I) {
        ++counters_.evals;
        return compute(I);
    }

    const OracleCounters& counters() const { return counters_; }
    void reset_counters() { counters_ = {}; }

protected:
    CostOracle() = default;
    virtual double compute(const Interval& I) = 0;
    OracleCounters counters_;
};

namespace detail {

template <typename F>
concept HasSelfCost = requires(const F f, const SeriesData& d, const Interval& I,
                               typename F::model_type* out) {
    { f.self_cost(d, I, out) } -> std::convertible_to<double>;
};

}  // namespace detail

// Classical oracle: fit on I, evaluate on I.  Memoization (on by default)
// keeps repeated queries from refitting, so `fits` counts distinct intervals.
template <ModelFamily F>
class DirectOracle final : public CostOracle {
public:
    DirectOracle(const SeriesData& data, F family, bool memoize = true)
        : data_(&data), family_(std::move(family)), memoize_(memoize) {}

    const F& family() const { return family_; }

protected:
    double compute(const Interval& I) override {
        if (memoize_) {
            const auto it = memo_.find(I);
            if (it != memo_.end()) return it->second;
        }
        double value;
        ++counters_.fits;
        if constexpr (detail::HasSelfCost<F>) {
            value = family_.self_cost(*data_, I, nullptr);
        } else {
            const auto model = family_.fit(*data_, I);
            value = family_.loss(model, *data_, I);
        }
        if (memoize_) memo_.emplace(I, value);
        return value;
    }

private:
    const SeriesData* data_;
    F family_;
    bool memoize_;
    std::unordered_map<Interval, double, IntervalHash> memo_;
};

// Accelerated oracle: cost(I) = loss on I of the model fitted to the longest
// pool interval inside I.  Models are fitted at most once per pool interval,
// so total fits are bounded by the pool size no matter how many intervals the
// search touches.
template <ModelFamily F>
class RelieverOracle final : public CostOracle {
public:
    RelieverOracle(const SeriesData& data, F family, std::shared_ptr<const ReliefPool> pool,
                   int delta_m, bool validate_coverage = true)
        : data_(&data), family_(std::move(family)), pool_(std::move(pool)), delta_m_(delta_m) {
        if (!pool_) throw std::invalid_argument("reliever: null pool");
        if (pool_->n() != data.n())
            throw std::invalid_argument("reliever: pool built for different n");
        if (validate_coverage) {
            if (const auto gap = pool_->first_uncovered(delta_m_))
                throw NoReliefError(*gap);
        }
    }

    const ReliefPool& pool() const { return *pool_; }
    std::size_t cached_fits() const { return cache_.size(); }
    const F& family() const { return family_; }

protected:
    double compute(const Interval& I) override {
        const auto R = pool_->best_relief(I);
        if (!R) throw NoReliefError(I);
        auto it = cache_.find(*R);
        if (it == cache_.end()) {
            ++counters_.fits;
            it = cache_.emplace(*R, family_.fit(*data_, *R)).first;
        }
        return family_.loss(it->second, *data_, I);
    }

private:
    const SeriesData* data_;
    F family_;
    std::shared_ptr<const ReliefPool> pool_;
    int delta_m_;
    std::unordered_map<Interval, typename F::model_type, IntervalHash> cache_;
};

// One-shot convenience, no caching or counting.
template <ModelFamily F>
double direct_cost(const F& family, const SeriesData& data, const Interval& I) {
    if constexpr (detail::HasSelfCost<F>) {
        return family.self_cost(data, I, nullptr);
    } else {
        const auto model = family.fit(data, I);
        return family.loss(model, data, I);
    }
}

}  // namespace cpd
