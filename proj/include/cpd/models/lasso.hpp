#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cpd/data.hpp"
#include "cpd/interval.hpp"

namespace cpd {

// Solution of  min_beta  sum_{i in I} (y_i - x_i' beta)^2 + lambda * |beta|_1,
// lambda = lambda_base * sqrt(|I|).
struct LassoModel {
    Eigen::VectorXd beta;
    double lambda_used = 0.0;
    int iterations = 0;  // coordinate-descent sweeps
    bool converged = false;
};

struct CdOptions {
    int max_iter = 1000;     // sweep budget
    double tol = 1e-7;       // max coefficient change per sweep
};

namespace detail {

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Cyclic coordinate descent on rows [I.lo, I.hi), maintaining the residual.
// Full sweeps bracket active-set refinement sweeps so the zero coordinates'
// KKT conditions are re-checked before declaring convergence.
class LassoWorkspace {
public:
    LassoWorkspace(const SeriesData& data, const Interval& I)
        : data_(data), lo_(I.lo), len_(I.length()), p_(data.p()) {
        colsq_.resize(p_);
        for (int j = 0; j < p_; ++j)
            colsq_[j] = data_.X.col(j).segment(lo_, len_).squaredNorm();
        beta_ = Eigen::VectorXd::Zero(p_);
        residual_ = data_.y.segment(lo_, len_);
    }

    void solve(double lambda, const CdOptions& opts, int* sweeps_io, bool* converged_out) {
        const double half = lambda / 2.0;
        int sweeps = 0;
        bool converged = false;
        while (sweeps < opts.max_iter) {
            const double full_delta = sweep_full(half);
            ++sweeps;
            if (full_delta <= opts.tol) {
                converged = true;
                break;
            }
            gather_active();
            while (sweeps < opts.max_iter) {
                const double act_delta = sweep_active(half);
                ++sweeps;
                if (act_delta <= opts.tol) break;
            }
        }
        *sweeps_io += sweeps;
        *converged_out = converged;
    }

    LassoModel snapshot(double lambda, int sweeps, bool converged) const {
        return LassoModel{beta_, lambda, sweeps, converged};
    }

    double rss() const { return residual_.squaredNorm(); }

private:
    double update_coord(int j, double half) {
        const double cj = colsq_[j];
        if (cj <= 0.0) return 0.0;
        const auto xj = data_.X.col(j).segment(lo_, len_);
        const double rho = xj.dot(residual_) + cj * beta_[j];
        const double bj = soft_threshold(rho, half) / cj;
        const double delta = bj - beta_[j];
        if (delta != 0.0) {
            residual_ -= delta * xj;
            beta_[j] = bj;
        }
        return std::abs(delta);
    }

    double sweep_full(double half) {
        double maxd = 0.0;
        for (int j = 0; j < p_; ++j) maxd = std::max(maxd, update_coord(j, half));
        return maxd;
    }

    double sweep_active(double half) {
        double maxd = 0.0;
        for (int j : active_) maxd = std::max(maxd, update_coord(j, half));
        return maxd;
    }

    void gather_active() {
        active_.clear();
        for (int j = 0; j < p_; ++j)
            if (beta_[j] != 0.0) active_.push_back(j);
    }

    const SeriesData& data_;
    int lo_, len_, p_;
    Eigen::VectorXd colsq_;
    Eigen::VectorXd beta_;
    Eigen::VectorXd residual_;
    std::vector<int> active_;
};

}  // namespace detail

struct LassoFit {
    LassoModel model;
    double rss = 0.0;  // in-sample residual sum of squares at the solution
};

inline LassoFit fit_lasso_full(const SeriesData& data, const Interval& I,
                               double lambda_base, const CdOptions& opts = {}) {
    if (data.kind != SeriesData::Kind::regression)
        throw std::invalid_argument("lasso: regression data required");
    data.check_interval(I);
    if (lambda_base < 0.0) throw std::invalid_argument("lasso: lambda_base must be >= 0");
    detail::LassoWorkspace ws(data, I);
    const double lambda = lambda_base * std::sqrt(static_cast<double>(I.length()));
    int sweeps = 0;
    bool converged = false;
    ws.solve(lambda, opts, &sweeps, &converged);
    return LassoFit{ws.snapshot(lambda, sweeps, converged), ws.rss()};
}

inline LassoModel fit_lasso(const SeriesData& data, const Interval& I,
                            double lambda_base, const CdOptions& opts = {}) {
    return fit_lasso_full(data, I, lambda_base, opts).model;
}

// One warm-started descent over a lambda_base grid; output is parallel to the
// input grid.  Each entry solves the same convex problem as a cold fit_lasso
// at that lambda, the warm starts only save sweeps.
inline std::vector<LassoFit> fit_lasso_path(const SeriesData& data, const Interval& I,
                                            const std::vector<double>& lambda_bases,
                                            const CdOptions& opts = {}) {
    if (data.kind != SeriesData::Kind::regression)
        throw std::invalid_argument("lasso: regression data required");
    data.check_interval(I);
    if (lambda_bases.empty()) throw std::invalid_argument("lasso: empty lambda grid");
    std::vector<int> order(lambda_bases.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return lambda_bases[static_cast<std::size_t>(a)] > lambda_bases[static_cast<std::size_t>(b)];
    });

    detail::LassoWorkspace ws(data, I);
    const double root_len = std::sqrt(static_cast<double>(I.length()));
    std::vector<LassoFit> out(lambda_bases.size());
    for (int idx : order) {
        const double lb = lambda_bases[static_cast<std::size_t>(idx)];
        if (lb < 0.0) throw std::invalid_argument("lasso: lambda_base must be >= 0");
        const double lambda = lb * root_len;
        int sweeps = 0;
        bool converged = false;
        ws.solve(lambda, opts, &sweeps, &converged);
        out[static_cast<std::size_t>(idx)] = LassoFit{ws.snapshot(lambda, sweeps, converged), ws.rss()};
    }
    return out;
}

// Cross-evaluation: residual sum of squares of `m` on the rows of I.  Exploits
// the sparse support, so cost is |I| * nnz(beta) not |I| * p.
inline double lasso_loss(const LassoModel& m, const SeriesData& data, const Interval& I) {
    if (data.kind != SeriesData::Kind::regression)
        throw std::invalid_argument("lasso: regression data required");
    data.check_interval(I);
    const int p = data.p();
    if (m.beta.size() != p) throw std::invalid_argument("lasso: model dimension mismatch");

    std::vector<int> support;
    for (int j = 0; j < p; ++j)
        if (m.beta[j] != 0.0) support.push_back(j);

    double rss = 0.0;
    for (int i = I.lo; i < I.hi; ++i) {
        double pred = 0.0;
        for (int j : support) pred += data.X(i, j) * m.beta[j];
        const double d = data.y[i] - pred;
        rss += d * d;
    }
    return rss;
}

// Largest violation of the subgradient optimality conditions:
//   active j:    | |2 x_j' r| - lambda |
//   inactive j:  max(0, |2 x_j' r| - lambda)
inline double lasso_kkt_gap(const LassoModel& m, const SeriesData& data, const Interval& I) {
    data.check_interval(I);
    const int len = I.length();
    Eigen::VectorXd r = data.y.segment(I.lo, len) -
                        data.X.middleRows(I.lo, len) * m.beta;
    double worst = 0.0;
    for (int j = 0; j < data.p(); ++j) {
        const double g = 2.0 * data.X.col(j).segment(I.lo, len).dot(r);
        if (m.beta[j] != 0.0)
            worst = std::max(worst, std::abs(std::abs(g) - m.lambda_used));
        else
            worst = std::max(worst, std::abs(g) - m.lambda_used);
    }
    return worst;
}

// Log-spaced lambda_base grid, descending, scaled by sqrt(log p).
inline std::vector<double> make_lambda_grid(int count, int p, double lo_frac = 1e-3,
                                            double hi_frac = 1.0) {
    if (count < 1) throw std::invalid_argument("lasso: grid count must be >= 1");
    if (!(lo_frac > 0.0) || !(hi_frac >= lo_frac))
        throw std::invalid_argument("lasso: bad grid range");
    const double scale = std::sqrt(std::log(static_cast<double>(std::max(p, 2))));
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = hi_frac * scale;
        return grid;
    }
    const double log_lo = std::log(lo_frac), log_hi = std::log(hi_frac);
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        grid[static_cast<std::size_t>(i)] = std::exp(log_hi + t * (log_lo - log_hi)) * scale;
    }
    return grid;
}

struct LassoFamily {
    using model_type = LassoModel;
    static constexpr const char* name = "lasso";

    double lambda_base = 0.1;
    CdOptions cd{};

    LassoModel fit(const SeriesData& data, const Interval& I) const {
        return fit_lasso(data, I, lambda_base, cd);
    }
    double loss(const LassoModel& m, const SeriesData& data, const Interval& I) const {
        return lasso_loss(m, data, I);
    }
    // fused fit + in-sample loss; the residual is already in hand at convergence
    double self_cost(const SeriesData& data, const Interval& I, LassoModel* out) const {
        LassoFit f = fit_lasso_full(data, I, lambda_base, cd);
        if (out) *out = std::move(f.model);
        return f.rss;
    }
};

}  // namespace cpd
