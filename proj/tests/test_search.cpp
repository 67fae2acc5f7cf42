#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cpd/models/mean.hpp"
#include "cpd/oracle.hpp"
#include "cpd/rng.hpp"
#include "cpd/search/binseg.hpp"
#include "cpd/search/dp.hpp"

using cpd::Interval;
using cpd::SeriesData;

namespace {

SeriesData shifted_series(int n, std::vector<int> cps, double jump, double noise,
                          std::uint64_t seed) {
    cpd::Rng rng(seed);
    std::vector<double> z(static_cast<std::size_t>(n));
    cps.push_back(n);
    int seg = 0;
    for (int i = 0; i < n; ++i) {
        if (i >= cps[static_cast<std::size_t>(seg)]) ++seg;
        z[static_cast<std::size_t>(i)] = seg * jump + noise * rng.normal();
    }
    return SeriesData::univariate(std::move(z));
}

// every segmentation of (0, n] with segments >= delta_m, by recursion
void enumerate_segmentations(int n, int delta_m, std::vector<int>& cur,
                             const std::function<void(const std::vector<int>&)>& visit) {
    visit(cur);
    const int lo = cur.empty() ? 0 : cur.back();
    for (int c = lo + delta_m; c <= n - delta_m; ++c) {
        cur.push_back(c);
        enumerate_segmentations(n, delta_m, cur, visit);
        cur.pop_back();
    }
}

double partition_cost(const SeriesData& data, const std::vector<int>& cps, int n) {
    double total = 0.0;
    for (const auto& seg : cpd::segments_of(cps, n))
        total += cpd::direct_cost(cpd::MeanFamily{}, data, seg);
    return total;
}

}  // namespace

TEST_CASE("segment-count search matches exhaustive enumeration", "[search]") {
    for (const int dm : {2, 3}) {
        for (const std::uint64_t seed : {101u, 202u, 303u}) {
            const int n = 14;
            const auto data = shifted_series(n, {5, 9}, 2.0, 0.6, seed);
            cpd::DirectOracle<cpd::MeanFamily> oracle(data, {});
            cpd::SearchConfig cfg;
            cfg.delta_m = dm;
            const int K_max = 3;
            const auto got = cpd::sn_search(oracle, n, K_max, cfg);
            REQUIRE(got.size() == static_cast<std::size_t>(K_max) + 1);

            std::vector<double> best(static_cast<std::size_t>(K_max) + 1,
                                     std::numeric_limits<double>::infinity());
            std::vector<int> cur;
            enumerate_segmentations(n, dm, cur, [&](const std::vector<int>& cps) {
                if (cps.size() > static_cast<std::size_t>(K_max)) return;
                best[cps.size()] =
                    std::min(best[cps.size()], partition_cost(data, cps, n));
            });

            for (int K = 0; K <= K_max; ++K) {
                CHECK(got[static_cast<std::size_t>(K)].total_cost ==
                      Catch::Approx(best[static_cast<std::size_t>(K)]).margin(1e-9));
                CHECK(got[static_cast<std::size_t>(K)].changepoints.size() ==
                      static_cast<std::size_t>(K));
                CHECK(cpd::spacing_ok(got[static_cast<std::size_t>(K)].changepoints, n, dm));
            }
        }
    }
}

TEST_CASE("segment-count search rejects infeasible budgets", "[search]") {
    const auto data = shifted_series(10, {}, 0.0, 1.0, 1);
    cpd::DirectOracle<cpd::MeanFamily> oracle(data, {});
    cpd::SearchConfig cfg;
    cfg.delta_m = 4;
    CHECK_THROWS_AS(cpd::sn_search(oracle, 10, 2, cfg), std::invalid_argument);
}

TEST_CASE("penalized search matches exhaustive enumeration", "[search]") {
    const int n = 12;
    for (const double gamma : {0.1, 1.0, 5.0}) {
        const auto data = shifted_series(n, {4, 8}, 1.5, 0.5, 77);
        cpd::DirectOracle<cpd::MeanFamily> oracle(data, {});
        cpd::SearchConfig cfg;
        cfg.delta_m = 2;
        cfg.gamma = gamma;
        const auto got = cpd::op_search(oracle, n, cfg);

        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_cps;
        std::vector<int> cur;
        enumerate_segmentations(n, 2, cur, [&](const std::vector<int>& cps) {
            const double v = partition_cost(data, cps, n) +
                             gamma * static_cast<double>(cps.size());
            if (v < best) {
                best = v;
                best_cps = cps;
            }
        });
        CHECK(got.total_cost == Catch::Approx(best).margin(1e-9));
        CHECK(got.changepoints == best_cps);
    }
}

TEST_CASE("disabling pruning reproduces plain optimal partitioning bitwise", "[search]") {
    const int n = 80;
    const auto data = shifted_series(n, {25, 55}, 2.0, 1.0, 5);
    cpd::SearchConfig cfg;
    cfg.delta_m = 5;
    cfg.gamma = 8.0;
    cfg.pruning_enabled = false;

    cpd::DirectOracle<cpd::MeanFamily> o1(data, {});
    const auto op = cpd::op_search(o1, n, cfg);
    cpd::DirectOracle<cpd::MeanFamily> o2(data, {});
    const auto pelt = cpd::pelt_search(o2, n, cfg);

    CHECK(op.changepoints == pelt.changepoints);
    CHECK(op.total_cost == pelt.total_cost);  // identical code path, bit for bit
    CHECK(o1.counters().evals == o2.counters().evals);
}

TEST_CASE("exact pruning keeps the optimum for the mean cost", "[search]") {
    const int n = 120;
    const auto data = shifted_series(n, {30, 60, 95}, 1.8, 0.9, 13);
    cpd::SearchConfig cfg;
    cfg.delta_m = 6;
    cfg.gamma = 10.0;

    cpd::DirectOracle<cpd::MeanFamily> o1(data, {});
    const auto op = cpd::op_search(o1, n, cfg);
    cpd::DirectOracle<cpd::MeanFamily> o2(data, {});
    const auto pelt = cpd::pelt_search(o2, n, cfg);

    CHECK(pelt.changepoints == op.changepoints);
    CHECK(pelt.total_cost == Catch::Approx(op.total_cost).margin(1e-9));
    CHECK(o2.counters().evals < o1.counters().evals);  // pruning must actually prune
}

TEST_CASE("binary segmentation nails a clean level shift", "[search]") {
    const int n = 60;
    const auto data = shifted_series(n, {30}, 5.0, 0.0, 0);
    cpd::DirectOracle<cpd::MeanFamily> oracle(data, {});
    cpd::SearchConfig cfg;
    cfg.delta_m = 5;
    cfg.K = 1;
    const auto seg = cpd::bs_search(oracle, n, cfg);
    REQUIRE(seg.changepoints == std::vector<int>{30});
    CHECK(seg.total_cost == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("threshold mode splits while the gain clears the bar", "[search]") {
    const int n = 90;
    const auto data = shifted_series(n, {30, 60}, 4.0, 0.1, 21);
    cpd::SearchConfig cfg;
    cfg.delta_m = 5;

    cfg.threshold = 5.0;
    cpd::DirectOracle<cpd::MeanFamily> o1(data, {});
    const auto low = cpd::bs_search(o1, n, cfg);
    CHECK(low.changepoints.size() == 2);

    cfg.threshold = 1e9;
    cpd::DirectOracle<cpd::MeanFamily> o2(data, {});
    const auto high = cpd::bs_search(o2, n, cfg);
    CHECK(high.changepoints.empty());
}

TEST_CASE("random-interval search is reproducible for a fixed seed", "[search]") {
    const int n = 150;
    const auto data = shifted_series(n, {40, 90}, 2.0, 1.0, 31);
    cpd::SearchConfig cfg;
    cfg.delta_m = 8;
    cfg.K = 2;
    cfg.M = 40;
    cfg.seed = 99;

    cpd::DirectOracle<cpd::MeanFamily> o1(data, {});
    const auto a = cpd::wbs_search(o1, n, cfg);
    cpd::DirectOracle<cpd::MeanFamily> o2(data, {});
    const auto b = cpd::wbs_search(o2, n, cfg);
    CHECK(a.changepoints == b.changepoints);
    CHECK(a.total_cost == b.total_cost);
}

TEST_CASE("the full interval is always among the random candidates", "[search]") {
    // even M=1 with an unlucky seed cannot miss a dominant single shift
    const int n = 80;
    const auto data = shifted_series(n, {40}, 6.0, 0.0, 0);
    cpd::SearchConfig cfg;
    cfg.delta_m = 5;
    cfg.K = 1;
    cfg.M = 1;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        cfg.seed = seed;
        cpd::DirectOracle<cpd::MeanFamily> oracle(data, {});
        const auto seg = cpd::wbs_search(oracle, n, cfg);
        CHECK(seg.changepoints == std::vector<int>{40});
    }
}

TEST_CASE("seeded intervals on an eight-point series", "[search]") {
    const auto got = cpd::seeded_intervals(8, 0.5, 1);
    const std::vector<Interval> want{
        {0, 8},
        {0, 4}, {2, 6}, {4, 8},
        {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 6}, {5, 7}, {6, 8},
    };
    CHECK(got == want);
}

TEST_CASE("seeded interval system stays small and in bounds", "[search]") {
    for (const int n : {50, 200, 1000}) {
        const auto ivs = cpd::seeded_intervals(n, 1.0 / std::sqrt(2.0), 5);
        CHECK(ivs.size() <= static_cast<std::size_t>(10 * n));
        for (const auto& iv : ivs) {
            CHECK(iv.lo >= 0);
            CHECK(iv.hi <= n);
            CHECK(iv.length() >= std::min(n, 2 * 5));
        }
        // deterministic
        CHECK(ivs == cpd::seeded_intervals(n, 1.0 / std::sqrt(2.0), 5));
    }
}

TEST_CASE("single-layer seeding degenerates to one split of the root", "[search]") {
    const int n = 18;  // n <= 2 * delta_m * (1/a) keeps one layer
    const auto data = shifted_series(n, {9}, 3.0, 0.4, 41);
    cpd::SearchConfig cfg;
    cfg.delta_m = 9;
    cfg.K = 1;
    cpd::DirectOracle<cpd::MeanFamily> o1(data, {});
    const auto seeded = cpd::seedbs_search(o1, n, cfg);
    cpd::DirectOracle<cpd::MeanFamily> o2(data, {});
    const auto plain = cpd::bs_search(o2, n, cfg);
    CHECK(seeded.changepoints == plain.changepoints);
}

TEST_CASE("every search honours the spacing constraint", "[search]") {
    const int n = 140;
    const int dm = 7;
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
        const auto data = shifted_series(n, {35, 70, 105}, 1.2, 1.0, seed);
        cpd::SearchConfig cfg;
        cfg.delta_m = dm;
        cfg.K = 4;
        cfg.gamma = 6.0;
        cfg.M = 30;
        cfg.seed = seed;

        cpd::DirectOracle<cpd::MeanFamily> o(data, {});
        for (const auto& seg :
             {cpd::bs_search(o, n, cfg), cpd::wbs_search(o, n, cfg),
              cpd::seedbs_search(o, n, cfg), cpd::op_search(o, n, cfg),
              cpd::pelt_search(o, n, cfg)}) {
            CHECK(cpd::spacing_ok(seg.changepoints, n, dm));
            CHECK(std::is_sorted(seg.changepoints.begin(), seg.changepoints.end()));
            CHECK(seg.per_segment_costs.size() == seg.changepoints.size() + 1);
            CHECK(seg.diag.evals > 0);
            CHECK(seg.diag.fits <= seg.diag.evals);
        }
        const auto sn = cpd::sn_search(o, n, 3, cfg);
        for (const auto& seg : sn) CHECK(cpd::spacing_ok(seg.changepoints, n, dm));
    }
}

TEST_CASE("larger penalties never add changepoints", "[search]") {
    const int n = 100;
    const auto data = shifted_series(n, {25, 50, 75}, 1.5, 0.8, 55);
    cpd::DirectOracle<cpd::MeanFamily> oracle(data, {});
    std::size_t last = std::numeric_limits<std::size_t>::max();
    for (const double gamma : {0.5, 2.0, 8.0, 32.0, 128.0}) {
        cpd::SearchConfig cfg;
        cfg.delta_m = 5;
        cfg.gamma = gamma;
        const auto seg = cpd::op_search(oracle, n, cfg);
        CHECK(seg.changepoints.size() <= last);
        last = seg.changepoints.size();
    }
}
