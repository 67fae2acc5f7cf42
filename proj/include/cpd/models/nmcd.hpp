#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpd/data.hpp"
#include "cpd/interval.hpp"

namespace cpd {

// Nonparametric segment model: the sorted sample, standing in for its ECDF.
struct EcdfModel {
    std::vector<double> sorted_sample;

    int size() const { return static_cast<int>(sorted_sample.size()); }

    // P(sample <= q)
    double ecdf(double q) const {
        const auto it = std::upper_bound(sorted_sample.begin(), sorted_sample.end(), q);
        return static_cast<double>(it - sorted_sample.begin()) / size();
    }

    // boundary-corrected CDF, kept away from {0, 1} so logs stay finite
    double corrected_cdf(double q) const {
        const int m = size();
        return (m * ecdf(q) + 0.5) / (m + 1.0);
    }
};

inline EcdfModel fit_ecdf(const SeriesData& data, const Interval& I) {
    if (data.kind != SeriesData::Kind::univariate)
        throw std::invalid_argument("ecdf: univariate data required");
    data.check_interval(I);
    EcdfModel m;
    m.sorted_sample.assign(data.z.begin() + I.lo, data.z.begin() + I.hi);
    std::sort(m.sorted_sample.begin(), m.sorted_sample.end());
    return m;
}

// Evaluation grid: quantiles of the full series at probabilities (j-0.5)/G,
// uniform weights.  Duplicate quantile values are merged (weights summed);
// all-equal data collapses to a single point and raises the degenerate flag.
struct NmcdGrid {
    std::vector<double> points;   // ascending, distinct
    std::vector<double> weights;
    bool degenerate = false;
};

inline int default_nmcd_grid_size(int n) {
    if (n < 2) throw std::invalid_argument("nmcd: need n >= 2 for a default grid");
    return static_cast<int>(std::ceil(4.0 * std::log(static_cast<double>(n))));
}

inline NmcdGrid make_nmcd_grid(const SeriesData& data, int n_points) {
    if (data.kind != SeriesData::Kind::univariate)
        throw std::invalid_argument("nmcd: univariate data required");
    if (n_points < 1) throw std::invalid_argument("nmcd: grid size must be >= 1");
    const int n = data.n();
    if (n < 1) throw std::invalid_argument("nmcd: empty series");

    std::vector<double> sorted = data.z;
    std::sort(sorted.begin(), sorted.end());

    NmcdGrid grid;
    const double unit = 1.0 / n_points;
    for (int j = 1; j <= n_points; ++j) {
        const double prob = (j - 0.5) / n_points;
        int idx = static_cast<int>(std::ceil(prob * n)) - 1;
        idx = std::clamp(idx, 0, n - 1);
        const double q = sorted[static_cast<std::size_t>(idx)];
        if (!grid.points.empty() && grid.points.back() == q)
            grid.weights.back() += unit;
        else {
            grid.points.push_back(q);
            grid.weights.push_back(unit);
        }
    }
    grid.degenerate = n_points > 1 && grid.points.size() == 1;
    return grid;
}

namespace detail {

// Per-point binomial log-likelihood of I's empirical CDF under the model's
// corrected CDF, summed over the grid:
//   -|I| * sum_j w_j [ Fhat_I(q_j) log Ftil(q_j) + (1-Fhat_I(q_j)) log(1-Ftil(q_j)) ].
// With model == ECDF of I this is |I| times the usual NMCD segment entropy.
inline double nmcd_cross_entropy(const EcdfModel& m, const NmcdGrid& grid,
                                 const std::vector<double>& frac_leq, int len) {
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.points.size(); ++j) {
        const double w = grid.weights[j];
        if (w == 0.0) continue;
        const double ft = m.corrected_cdf(grid.points[j]);
        const double p = frac_leq[j];
        acc += w * (p * std::log(ft) + (1.0 - p) * std::log(1.0 - ft));
    }
    return -static_cast<double>(len) * acc;
}

}  // namespace detail

inline double nmcd_loss(const EcdfModel& m, const SeriesData& data, const Interval& I,
                        const NmcdGrid& grid) {
    if (data.kind != SeriesData::Kind::univariate)
        throw std::invalid_argument("nmcd: univariate data required");
    data.check_interval(I);
    if (m.size() < 1) throw std::invalid_argument("nmcd: empty model sample");
    const std::size_t g = grid.points.size();
    if (grid.weights.size() != g) throw std::invalid_argument("nmcd: grid weight mismatch");

    // one pass over I: bucket each value by grid position, then cumulate
    std::vector<double> counts(g + 1, 0.0);
    for (int i = I.lo; i < I.hi; ++i) {
        const auto it = std::lower_bound(grid.points.begin(), grid.points.end(),
                                         data.z[static_cast<std::size_t>(i)]);
        counts[static_cast<std::size_t>(it - grid.points.begin())] += 1.0;
    }
    std::vector<double> frac_leq(g);
    double running = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
        running += counts[j];
        frac_leq[j] = running / I.length();
    }
    // counts[j] holds #values in (points[j-1], points[j]]; running after j
    // accumulates everything <= points[j]
    return detail::nmcd_cross_entropy(m, grid, frac_leq, I.length());
}

struct NmcdFamily {
    using model_type = EcdfModel;
    static constexpr const char* name = "nmcd";

    NmcdGrid grid;

    EcdfModel fit(const SeriesData& data, const Interval& I) const {
        return fit_ecdf(data, I);
    }
    double loss(const EcdfModel& m, const SeriesData& data, const Interval& I) const {
        return nmcd_loss(m, data, I, grid);
    }
    // self evaluation needs no second data pass: the interval's empirical CDF
    // is the model's own sample
    double self_cost(const SeriesData& data, const Interval& I, EcdfModel* out) const {
        EcdfModel m = fit_ecdf(data, I);
        std::vector<double> frac_leq(grid.points.size());
        for (std::size_t j = 0; j < grid.points.size(); ++j)
            frac_leq[j] = m.ecdf(grid.points[j]);
        const double value = detail::nmcd_cross_entropy(m, grid, frac_leq, I.length());
        if (out) *out = std::move(m);
        return value;
    }
};

}  // namespace cpd
