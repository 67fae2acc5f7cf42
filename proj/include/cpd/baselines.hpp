#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cpd/data.hpp"
#include "cpd/interval.hpp"
#include "cpd/models/lasso.hpp"
#include "cpd/rng.hpp"
#include "cpd/search/binseg.hpp"
#include "cpd/search/common.hpp"

namespace cpd {

// Guess locations at the interior quantiles of I: I.lo + floor(j |I| / (m+1)).
inline std::vector<int> quantile_guesses(const Interval& I, int m) {
    if (m < 1) throw std::invalid_argument("twostep: need at least one guess");
    std::vector<int> gs;
    for (int j = 1; j <= m; ++j) {
        const int g = I.lo + static_cast<int>(
                                 (static_cast<long long>(j) * I.length()) / (m + 1));
        if (g <= I.lo || g >= I.hi) continue;
        if (gs.empty() || gs.back() != g) gs.push_back(g);
    }
    return gs;
}

struct TwoStepResult {
    int tau = -1;
    double total_loss = std::numeric_limits<double>::infinity();
    int guess = -1;      // the pilot guess that won
    int fits = 0;        // lasso fits spent
};

namespace detail {

// Residual squares of a fixed model over rows [lo, hi), via the sparse
// support; out is indexed absolutely.
inline void residual_squares(const SeriesData& data, const LassoModel& m, int lo, int hi,
                             std::vector<double>& out) {
    std::vector<int> support;
    for (int j = 0; j < data.p(); ++j)
        if (m.beta[j] != 0.0) support.push_back(j);
    out.assign(static_cast<std::size_t>(data.n()), 0.0);
    for (int i = lo; i < hi; ++i) {
        double pred = 0.0;
        for (int j : support) pred += data.X(i, j) * m.beta[j];
        const double d = data.y[i] - pred;
        out[static_cast<std::size_t>(i)] = d * d;
    }
}

}  // namespace detail

// Two-step single-changepoint estimator: for each pilot guess g, fit one model
// per side of g, then place the changepoint where the combined residual sum of
// the two *fixed* models is smallest.  The guess with the smallest combined
// loss wins; ties take the earlier guess, and within a guess the smallest tau.
inline TwoStepResult twostep_single(const SeriesData& data, const std::vector<int>& guesses,
                                    double lambda_base, int delta_m,
                                    const CdOptions& cd = {}) {
    if (data.kind != SeriesData::Kind::regression)
        throw std::invalid_argument("twostep: regression data required");
    const int n = data.n();
    if (delta_m < 1 || n < 2 * delta_m)
        throw std::invalid_argument("twostep: need n >= 2 * delta_m");
    if (guesses.empty()) throw std::invalid_argument("twostep: no guesses");

    TwoStepResult best;
    std::vector<double> r1, r2;
    for (const int g : guesses) {
        if (g <= delta_m || g >= n - delta_m)
            throw std::invalid_argument("twostep: guess " + std::to_string(g) +
                                        " not strictly inside (delta_m, n - delta_m)");
        const LassoModel m1 = fit_lasso(data, {0, g}, lambda_base, cd);
        const LassoModel m2 = fit_lasso(data, {g, n}, lambda_base, cd);
        best.fits += 2;

        detail::residual_squares(data, m1, 0, n, r1);
        detail::residual_squares(data, m2, 0, n, r2);
        // prefix of model-1 squares + suffix of model-2 squares, swept over tau
        double suffix2 = 0.0;
        for (int i = 0; i < n; ++i) suffix2 += r2[static_cast<std::size_t>(i)];
        double prefix1 = 0.0;
        double best_here = std::numeric_limits<double>::infinity();
        int tau_here = -1;
        for (int tau = 1; tau <= n - delta_m; ++tau) {
            prefix1 += r1[static_cast<std::size_t>(tau - 1)];
            suffix2 -= r2[static_cast<std::size_t>(tau - 1)];
            if (tau < delta_m) continue;
            const double v = prefix1 + suffix2;
            if (v < best_here) {
                best_here = v;
                tau_here = tau;
            }
        }
        if (best_here < best.total_loss) {
            best.total_loss = best_here;
            best.tau = tau_here;
            best.guess = g;
        }
    }
    return best;
}

// ---- multi-changepoint extension: two-step as the split finder inside the
// ---- greedy segmentation loops

struct TwoStepSearchConfig {
    int K = 1;
    int guesses_m = 3;        // pilot guesses per scanned segment
    double lambda_base = 0.1;
    int delta_m = 1;
    CdOptions cd{};
    int M = 100;              // wbs variant
    std::uint64_t seed = 0;   // wbs variant
    double decay_a = 0.7071067811865476;  // seedbs variant
};

namespace detail {

struct TwoStepSplit {
    bool valid = false;
    int tau = -1;
    double gain = -std::numeric_limits<double>::infinity();
    double split_loss = 0.0;
};

// Split scan localized to (seg.lo, seg.hi]; gain is measured against a single
// model fitted on the whole segment, with every fit at the shared lambda_base.
inline TwoStepSplit twostep_split(const SeriesData& data, const Interval& seg,
                                  const TwoStepSearchConfig& cfg, int* fits) {
    TwoStepSplit r;
    if (seg.length() < 2 * cfg.delta_m) return r;

    const double parent = fit_lasso_full(data, seg, cfg.lambda_base, cfg.cd).rss;
    ++*fits;

    std::vector<double> r1, r2;
    for (const int g : quantile_guesses(seg, cfg.guesses_m)) {
        const LassoModel m1 = fit_lasso(data, {seg.lo, g}, cfg.lambda_base, cfg.cd);
        const LassoModel m2 = fit_lasso(data, {g, seg.hi}, cfg.lambda_base, cfg.cd);
        *fits += 2;
        residual_squares(data, m1, seg.lo, seg.hi, r1);
        residual_squares(data, m2, seg.lo, seg.hi, r2);

        double suffix2 = 0.0;
        for (int i = seg.lo; i < seg.hi; ++i) suffix2 += r2[static_cast<std::size_t>(i)];
        double prefix1 = 0.0;
        for (int tau = seg.lo + 1; tau <= seg.hi - cfg.delta_m; ++tau) {
            prefix1 += r1[static_cast<std::size_t>(tau - 1)];
            suffix2 -= r2[static_cast<std::size_t>(tau - 1)];
            if (tau - seg.lo < cfg.delta_m) continue;
            const double split_loss = prefix1 + suffix2;
            const double g_val = parent - split_loss;
            if (!r.valid || g_val > r.gain) {
                r.valid = true;
                r.tau = tau;
                r.gain = g_val;
                r.split_loss = split_loss;
            }
        }
    }
    return r;
}

inline Segmentation twostep_greedy(const SeriesData& data, const TwoStepSearchConfig& cfg,
                                   const std::vector<Interval>& candidates,
                                   bool recurse_on_children) {
    const auto t0 = std::chrono::steady_clock::now();
    int fits = 0;

    struct Cand {
        Interval seg;
        TwoStepSplit split;
        bool alive = true;
    };
    std::vector<Cand> cands;
    for (const auto& c : candidates)
        cands.push_back({c, twostep_split(data, c, cfg, &fits), true});

    std::vector<int> cps;
    while (static_cast<int>(cps.size()) < cfg.K) {
        int pick = -1;
        for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
            const auto& c = cands[static_cast<std::size_t>(i)];
            if (!c.alive || !c.split.valid) continue;
            if (pick < 0) {
                pick = i;
                continue;
            }
            const auto& b = cands[static_cast<std::size_t>(pick)];
            if (c.split.gain > b.split.gain ||
                (c.split.gain == b.split.gain &&
                 (c.seg.lo < b.seg.lo || (c.seg.lo == b.seg.lo && c.seg.hi < b.seg.hi))))
                pick = i;
        }
        if (pick < 0) break;
        auto chosen = cands[static_cast<std::size_t>(pick)];
        const int tau = chosen.split.tau;
        cps.push_back(tau);
        for (auto& c : cands)
            if (c.alive && c.seg.lo < tau && tau < c.seg.hi) c.alive = false;
        if (recurse_on_children) {
            const Interval left{chosen.seg.lo, tau}, right{tau, chosen.seg.hi};
            cands.push_back({left, twostep_split(data, left, cfg, &fits), true});
            cands.push_back({right, twostep_split(data, right, cfg, &fits), true});
        }
    }

    std::sort(cps.begin(), cps.end());
    Segmentation out;
    out.changepoints = std::move(cps);
    for (const auto& piece : segments_of(out.changepoints, data.n())) {
        const double c = fit_lasso_full(data, piece, cfg.lambda_base, cfg.cd).rss;
        ++fits;
        out.per_segment_costs.push_back(c);
        out.total_cost += c;
    }
    out.diag.fits = static_cast<std::uint64_t>(fits);
    out.diag.evals = out.diag.fits;
    out.diag.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    return out;
}

}  // namespace detail

// Binary segmentation with the two-step estimator as the split finder.
inline Segmentation twostep_bs_search(const SeriesData& data, const TwoStepSearchConfig& cfg) {
    const int n = data.n();
    if (cfg.delta_m < 1 || n < cfg.delta_m)
        throw std::invalid_argument("twostep-bs: bad delta_m");
    return detail::twostep_greedy(data, cfg, {Interval{0, n}}, /*recurse=*/true);
}

inline Segmentation twostep_wbs_search(const SeriesData& data, const TwoStepSearchConfig& cfg) {
    const int n = data.n();
    if (cfg.delta_m < 1 || n < cfg.delta_m)
        throw std::invalid_argument("twostep-wbs: bad delta_m");
    std::vector<Interval> candidates{{0, n}};
    Rng rng(cfg.seed);
    for (int d = 0; d < cfg.M; ++d) {
        for (int attempt = 0; attempt < 10'000; ++attempt) {
            const int lo = rng.uniform_int(0, n);
            const int hi = rng.uniform_int(0, n);
            if (lo < hi - 2 * cfg.delta_m) {
                candidates.push_back({lo, hi});
                break;
            }
        }
    }
    return detail::twostep_greedy(data, cfg, candidates, /*recurse=*/false);
}

inline Segmentation twostep_seedbs_search(const SeriesData& data,
                                          const TwoStepSearchConfig& cfg) {
    const int n = data.n();
    if (cfg.delta_m < 1 || n < cfg.delta_m)
        throw std::invalid_argument("twostep-seedbs: bad delta_m");
    return detail::twostep_greedy(data, cfg,
                                  seeded_intervals(n, cfg.decay_a, cfg.delta_m),
                                  /*recurse=*/false);
}

}  // namespace cpd
