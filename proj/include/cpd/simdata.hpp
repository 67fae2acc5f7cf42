#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpd/data.hpp"
#include "cpd/rng.hpp"

namespace cpd {

// Ground truth and provenance of a simulated series.
struct SimScenario {
    std::string kind;
    int n = 0;
    int p = 0;
    std::uint64_t seed = 0;
    std::string rng;
    std::vector<int> true_changepoints;
    std::vector<Eigen::VectorXd> coefs;       // per-segment coefficients (regression)
    std::vector<std::string> segment_dists;   // per-segment law (nonparam)
};

namespace detail {

constexpr double kCpFracs[3] = {0.22, 0.55, 0.77};

inline std::vector<int> grid_changepoints(int n) {
    return {static_cast<int>(std::floor(kCpFracs[0] * n)),
            static_cast<int>(std::floor(kCpFracs[1] * n)),
            static_cast<int>(std::floor(kCpFracs[2] * n))};
}

}  // namespace detail

// Piecewise linear model in p dimensions, four segments.  The first
// coefficient vector has norm 2, consecutive segments differ by norm 1/2; both
// live on coordinates {1, 2} with directions drawn uniformly on the circle.
// Draw order: 4 angles, then per observation its p covariates and one noise
// term.
inline std::pair<SeriesData, SimScenario> gen_hd_linear(int n, int p, std::uint64_t seed) {
    if (n < 4 || p < 2) throw std::invalid_argument("hd_linear: need n >= 4, p >= 2");
    Rng rng(seed);

    std::vector<Eigen::VectorXd> coefs;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    {
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        theta[0] = 2.0 * std::cos(phi);
        theta[1] = 2.0 * std::sin(phi);
        coefs.push_back(theta);
    }
    for (int k = 1; k < 4; ++k) {
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        theta[0] += 0.5 * std::cos(phi);
        theta[1] += 0.5 * std::sin(phi);
        coefs.push_back(theta);
    }

    const std::vector<int> cps = detail::grid_changepoints(n);
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    int seg = 0;
    for (int i = 0; i < n; ++i) {
        while (seg < static_cast<int>(cps.size()) && i >= cps[static_cast<std::size_t>(seg)])
            ++seg;
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        y[i] = X.row(i).dot(coefs[static_cast<std::size_t>(seg)]) + rng.normal();
    }

    SimScenario sc{"hd_linear", n, p, seed, Rng::kind(), cps, std::move(coefs), {}};
    return {SeriesData::regression(std::move(X), std::move(y)), std::move(sc)};
}

// Univariate distributional changes on the same changepoint grid, all
// standardized to mean 0 and variance 1:
//   N(0,1), (chi^2_3 - 3)/sqrt(6), (chi^2_1 - 1)/sqrt(2), N(0,1).
inline std::pair<SeriesData, SimScenario> gen_nonparam(int n, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("nonparam: need n >= 4");
    Rng rng(seed);

    const std::vector<int> cps = detail::grid_changepoints(n);
    const std::vector<std::string> dists{"normal", "chi2_3_std", "chi2_1_std", "normal"};
    std::vector<double> z(static_cast<std::size_t>(n));
    int seg = 0;
    for (int i = 0; i < n; ++i) {
        while (seg < static_cast<int>(cps.size()) && i >= cps[static_cast<std::size_t>(seg)])
            ++seg;
        switch (seg) {
            case 1: z[static_cast<std::size_t>(i)] = (rng.chi_squared(3) - 3.0) / std::sqrt(6.0); break;
            case 2: z[static_cast<std::size_t>(i)] = (rng.chi_squared(1) - 1.0) / std::sqrt(2.0); break;
            default: z[static_cast<std::size_t>(i)] = rng.normal(); break;
        }
    }

    SimScenario sc{"nonparam", n, 0, seed, Rng::kind(), cps, {}, dists};
    return {SeriesData::univariate(std::move(z)), std::move(sc)};
}

// Single early changepoint at tau* = floor(n/10) with correlated covariates,
// Sigma_ij = 2^{-|i-j|}: beta switches from 1/3 on coordinates 1-4 to 1/3 on
// coordinates 5-8.  Draw order: per observation p iid normals (mapped through
// the Cholesky factor), then one noise term.
inline std::pair<SeriesData, SimScenario> gen_single_cp(int n, int p, std::uint64_t seed) {
    if (p < 8) throw std::invalid_argument("single_cp: need p >= 8");
    if (n < 20) throw std::invalid_argument("single_cp: need n >= 20");
    Rng rng(seed);

    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            sigma(i, j) = std::pow(2.0, -std::abs(i - j));
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();

    Eigen::VectorXd beta1 = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd beta2 = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < 4; ++j) beta1[j] = 1.0 / 3.0;
    for (int j = 4; j < 8; ++j) beta2[j] = 1.0 / 3.0;

    const int tau = n / 10;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    Eigen::VectorXd g(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) g[j] = rng.normal();
        X.row(i) = (chol * g).transpose();
        const Eigen::VectorXd& beta = i < tau ? beta1 : beta2;
        y[i] = X.row(i).dot(beta) + rng.normal();
    }

    SimScenario sc{"single_cp", n, p, seed, Rng::kind(), {tau}, {beta1, beta2}, {}};
    return {SeriesData::regression(std::move(X), std::move(y)), std::move(sc)};
}

}  // namespace cpd
