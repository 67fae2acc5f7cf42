#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "cpd/interval.hpp"

namespace cpd {

// Observations indexed 1..n; interval (lo, hi] maps to 0-based rows [lo, hi).
// Univariate series carry z only; regression series carry (X, y).
struct SeriesData {
    enum class Kind { univariate, regression };

    Kind kind = Kind::univariate;
    std::vector<double> z;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    static SeriesData univariate(std::vector<double> values) {
        SeriesData d;
        d.kind = Kind::univariate;
        d.z = std::move(values);
        return d;
    }

    static SeriesData regression(Eigen::MatrixXd design, Eigen::VectorXd response) {
        if (design.rows() != response.size())
            throw std::invalid_argument("series: X rows and y length differ");
        SeriesData d;
        d.kind = Kind::regression;
        d.X = std::move(design);
        d.y = std::move(response);
        return d;
    }

    int n() const {
        return kind == Kind::univariate ? static_cast<int>(z.size())
                                        : static_cast<int>(y.size());
    }
    int p() const { return kind == Kind::regression ? static_cast<int>(X.cols()) : 0; }

    void check_interval(const Interval& I) const {
        if (I.lo < 0 || I.hi > n() || I.lo >= I.hi)
            throw std::invalid_argument("series: interval " + to_string(I) +
                                        " out of range for n=" + std::to_string(n()));
    }
};

}  // namespace cpd
