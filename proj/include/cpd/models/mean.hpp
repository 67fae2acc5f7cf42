#pragma once

#include <stdexcept>

#include "cpd/data.hpp"
#include "cpd/interval.hpp"

namespace cpd {

struct MeanModel {
    double mu = 0.0;
};

inline MeanModel fit_mean(const SeriesData& data, const Interval& I) {
    if (data.kind != SeriesData::Kind::univariate)
        throw std::invalid_argument("mean: univariate data required");
    data.check_interval(I);
    double s = 0.0;
    for (int i = I.lo; i < I.hi; ++i) s += data.z[static_cast<std::size_t>(i)];
    return MeanModel{s / I.length()};
}

inline double mean_loss(const MeanModel& m, const SeriesData& data, const Interval& I) {
    if (data.kind != SeriesData::Kind::univariate)
        throw std::invalid_argument("mean: univariate data required");
    data.check_interval(I);
    double s = 0.0;
    for (int i = I.lo; i < I.hi; ++i) {
        const double d = data.z[static_cast<std::size_t>(i)] - m.mu;
        s += d * d;
    }
    return s;
}

// Family bundle used by the cost oracles.
struct MeanFamily {
    using model_type = MeanModel;
    static constexpr const char* name = "mean";

    MeanModel fit(const SeriesData& data, const Interval& I) const {
        return fit_mean(data, I);
    }
    double loss(const MeanModel& m, const SeriesData& data, const Interval& I) const {
        return mean_loss(m, data, I);
    }
};

}  // namespace cpd
