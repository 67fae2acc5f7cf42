#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cpd/relief.hpp"
#include "cpd/rng.hpp"

using cpd::Interval;
using cpd::ReliefPool;

TEST_CASE("medium pool layer structure", "[relief]") {
    // n=200, delta_m=50, w=1/4, b=5/4: eight layers, the finest of length 40
    const auto pool = ReliefPool::build(200, 50, 0.25, 1.25);
    REQUIRE(pool.layers().size() == 8);

    const auto& l0 = pool.layers()[0];
    CHECK(l0.length == Catch::Approx(40.0));
    CHECK(l0.shift == Catch::Approx(10.0));
    CHECK(l0.offset == Catch::Approx(0.0));
    CHECK(l0.count == 17);

    // layer 0 is the contiguous comb (10q, 10q+40]
    for (int q = 0; q <= 16; ++q) {
        const Interval expect{10 * q, 10 * q + 40};
        CHECK(std::find(pool.intervals().begin(), pool.intervals().end(), expect) !=
              pool.intervals().end());
    }
}

TEST_CASE("tiny pool is exactly the halves and the whole", "[relief]") {
    const auto pool = ReliefPool::build(100, 100, 1.0, 2.0);
    REQUIRE(pool.size() == 3);
    const std::set<Interval> got(pool.intervals().begin(), pool.intervals().end());
    const std::set<Interval> want{{0, 50}, {50, 100}, {0, 100}};
    CHECK(got == want);
    CHECK(pool.layers().size() == 2);
}

TEST_CASE("pool construction rejects bad parameters", "[relief]") {
    CHECK_THROWS_AS(ReliefPool::build(100, 200, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ReliefPool::build(100, 1, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ReliefPool::build(100, 10, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ReliefPool::build(100, 10, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ReliefPool::from_coverage(100, 10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ReliefPool::from_coverage(100, 10, 1.0), std::invalid_argument);
}

TEST_CASE("desk-scale pool size lands near 440", "[relief]") {
    const double b = std::sqrt(2.0);
    const auto pool = ReliefPool::build(1200, 30, b - 1.0, b);
    CHECK(std::abs(static_cast<double>(pool.size()) - 440.0) <= 0.03 * 440.0);
}

TEST_CASE("coverage mapping matches explicit parameters", "[relief]") {
    for (const double r : {0.5, 0.7, 0.9}) {
        const double b = 1.0 / std::sqrt(r);
        const auto a = ReliefPool::from_coverage(400, 25, r);
        const auto c = ReliefPool::build(400, 25, b - 1.0, b);
        CHECK(a.intervals() == c.intervals());
        CHECK(a.coverage_bound() == Catch::Approx(r));
    }
}

TEST_CASE("construction is deterministic", "[relief]") {
    const auto a = ReliefPool::from_coverage(700, 25, 0.85);
    const auto b = ReliefPool::from_coverage(700, 25, 0.85);
    CHECK(a.intervals() == b.intervals());
    CHECK(a.size() == b.size());
}

TEST_CASE("pool intervals stay inside the series and respect the size bound", "[relief]") {
    cpd::Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = rng.uniform_int(50, 600);
        const int dm = rng.uniform_int(2, std::max(2, n / 5));
        const double r = rng.uniform(0.35, 0.95);
        const auto pool = ReliefPool::from_coverage(n, dm, r);

        for (const auto& iv : pool.intervals()) {
            CHECK(iv.lo >= 0);
            CHECK(iv.hi <= n);
            CHECK(iv.lo < iv.hi);
        }
        const double c = ReliefPool::size_constant(pool.w(), pool.b());
        CHECK(static_cast<double>(pool.size()) <=
              c * n / dm + static_cast<double>(pool.layers().size()) + 1.0);
    }
}

TEST_CASE("best_relief picks the longest contained interval, then smallest lo", "[relief]") {
    const auto pool = ReliefPool::build(100, 100, 1.0, 2.0);
    auto r = pool.best_relief({0, 100});
    REQUIRE(r);
    CHECK(*r == Interval{0, 100});

    r = pool.best_relief({0, 60});
    REQUIRE(r);
    CHECK(*r == Interval{0, 50});

    CHECK_FALSE(pool.best_relief({10, 55}));  // too short to hold any pool interval
}

TEST_CASE("best_relief agrees with a brute-force scan", "[relief]") {
    const auto pool = ReliefPool::from_coverage(300, 20, 0.8);
    cpd::Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const int len = rng.uniform_int(1, 300);
        const int lo = rng.uniform_int(0, 300 - len);
        const Interval I{lo, lo + len};

        Interval best{0, 0};
        bool found = false;
        for (const auto& iv : pool.intervals()) {
            if (!I.contains(iv)) continue;
            if (!found || iv.length() > best.length() ||
                (iv.length() == best.length() && iv.lo < best.lo)) {
                best = iv;
                found = true;
            }
        }
        const auto got = pool.best_relief(I);
        REQUIRE(static_cast<bool>(got) == found);
        if (found) CHECK(*got == best);
    }
}

TEST_CASE("coverage rate meets the design target", "[relief]") {
    const auto trivial = ReliefPool::build(100, 100, 1.0, 2.0);
    CHECK(trivial.coverage_rate(100) == Catch::Approx(1.0));

    const auto pool = ReliefPool::from_coverage(400, 30, 0.8);
    CHECK(pool.coverage_rate(30) >= 0.8 - 2.0 / 30);
}

TEST_CASE("coverage enumeration refuses to exceed its budget", "[relief]") {
    const auto pool = ReliefPool::from_coverage(400, 30, 0.8);
    CHECK_THROWS_AS(pool.coverage_rate(30, /*budget=*/100), std::runtime_error);
}

TEST_CASE("first_uncovered distinguishes adequate from inadequate pools", "[relief]") {
    const auto good = ReliefPool::from_coverage(300, 30, 0.9);
    CHECK_FALSE(good.first_uncovered(30));

    // built for delta_m=100, so plenty of length-30 intervals have no relief
    const auto sparse = ReliefPool::build(300, 100, 1.0, 2.0);
    CHECK(sparse.first_uncovered(30).has_value());
}

TEST_CASE("golden pool counts are stable", "[relief][golden]") {
    std::ifstream golden(std::string(CPD_TEST_DATA_DIR) + "/pool_counts_golden.csv");
    REQUIRE(golden.is_open());

    std::string header;
    REQUIRE(std::getline(golden, header));
    CHECK(header == "r,count");
    std::string line;
    int rows = 0;
    while (std::getline(golden, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string r_str, count_str;
        REQUIRE(std::getline(ss, r_str, ','));
        REQUIRE(std::getline(ss, count_str, ','));
        const double r = std::stod(r_str);
        const auto pool = ReliefPool::from_coverage(1200, 30, r);
        CHECK(pool.size() == std::stoull(count_str));
        ++rows;
    }
    CHECK(rows == 8);
}
