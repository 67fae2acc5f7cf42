#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "cpd/simdata.hpp"

namespace {

double sample_mean(const std::vector<double>& z, int lo, int hi) {
    double s = 0.0;
    for (int i = lo; i < hi; ++i) s += z[static_cast<std::size_t>(i)];
    return s / (hi - lo);
}

double sample_var(const std::vector<double>& z, int lo, int hi) {
    const double m = sample_mean(z, lo, hi);
    double s = 0.0;
    for (int i = lo; i < hi; ++i) {
        const double d = z[static_cast<std::size_t>(i)] - m;
        s += d * d;
    }
    return s / (hi - lo - 1);
}

}  // namespace

TEST_CASE("changepoint grid lands on the fixed fractions", "[simdata]") {
    auto [data, sc] = cpd::gen_hd_linear(600, 20, 1);
    CHECK(sc.true_changepoints == std::vector<int>{132, 330, 462});
    CHECK(data.n() == 600);
    CHECK(data.p() == 20);
    CHECK(sc.kind == "hd_linear");
    CHECK(sc.rng == cpd::Rng::kind());

    auto [d2, s2] = cpd::gen_hd_linear(1200, 10, 2);
    CHECK(s2.true_changepoints == std::vector<int>{264, 660, 924});
}

TEST_CASE("linear-model coefficients follow the norm recipe", "[simdata]") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto [data, sc] = cpd::gen_hd_linear(100, 12, seed);
        REQUIRE(sc.coefs.size() == 4);
        CHECK(sc.coefs[0].norm() == Catch::Approx(2.0).margin(1e-12));
        for (int k = 1; k < 4; ++k)
            CHECK((sc.coefs[static_cast<std::size_t>(k)] -
                   sc.coefs[static_cast<std::size_t>(k - 1)])
                      .norm() == Catch::Approx(0.5).margin(1e-12));
        // signal lives on the first two coordinates only
        for (const auto& c : sc.coefs)
            CHECK(c.tail(c.size() - 2).norm() == 0.0);
    }
}

TEST_CASE("distributional segments match their advertised moments", "[simdata]") {
    auto [data, sc] = cpd::gen_nonparam(40000, 7);
    REQUIRE(sc.true_changepoints == std::vector<int>{8800, 22000, 30800});
    REQUIRE(sc.segment_dists ==
            std::vector<std::string>{"normal", "chi2_3_std", "chi2_1_std", "normal"});

    const std::vector<int> bounds{0, 8800, 22000, 30800, 40000};
    for (int s = 0; s < 4; ++s) {
        const double m = sample_mean(data.z, bounds[static_cast<std::size_t>(s)],
                                     bounds[static_cast<std::size_t>(s) + 1]);
        const double v = sample_var(data.z, bounds[static_cast<std::size_t>(s)],
                                    bounds[static_cast<std::size_t>(s) + 1]);
        CHECK(m == Catch::Approx(0.0).margin(0.06));
        CHECK(v == Catch::Approx(1.0).margin(0.12));
    }
    // the standardized chi-square segments are right-skewed, the normals are not
    const auto skew = [&](int lo, int hi) {
        const double mu = sample_mean(data.z, lo, hi);
        double s3 = 0.0;
        for (int i = lo; i < hi; ++i) {
            const double d = data.z[static_cast<std::size_t>(i)] - mu;
            s3 += d * d * d;
        }
        return s3 / (hi - lo);
    };
    CHECK(std::abs(skew(0, 8800)) < 0.3);
    CHECK(skew(8800, 22000) > 0.8);    // chi2_3: skewness ~ 1.63
    CHECK(skew(22000, 30800) > 1.8);   // chi2_1: skewness ~ 2.83
}

TEST_CASE("early-changepoint design has the documented structure", "[simdata]") {
    auto [data, sc] = cpd::gen_single_cp(400, 100, 11);
    REQUIRE(sc.true_changepoints == std::vector<int>{40});
    REQUIRE(sc.coefs.size() == 2);
    for (int j = 0; j < 100; ++j) {
        const double b1 = sc.coefs[0][j], b2 = sc.coefs[1][j];
        if (j < 4) {
            CHECK(b1 == Catch::Approx(1.0 / 3.0));
            CHECK(b2 == 0.0);
        } else if (j < 8) {
            CHECK(b1 == 0.0);
            CHECK(b2 == Catch::Approx(1.0 / 3.0));
        } else {
            CHECK(b1 == 0.0);
            CHECK(b2 == 0.0);
        }
    }
}

TEST_CASE("covariate correlation decays geometrically with lag", "[simdata]") {
    auto [data, sc] = cpd::gen_single_cp(6000, 10, 13);
    // empirical Cov(x_j, x_k) ~ 2^{-|j-k|}
    for (const auto [a, b] : {std::pair{0, 0}, {0, 1}, {2, 5}, {4, 5}}) {
        const auto ca = data.X.col(a);
        const auto cb = data.X.col(b);
        const double cov = (ca.array() - ca.mean()).matrix().dot(
                               (cb.array() - cb.mean()).matrix()) /
                           (data.n() - 1);
        CHECK(cov == Catch::Approx(std::pow(2.0, -std::abs(a - b))).margin(0.08));
    }
}

TEST_CASE("generation is deterministic in the seed", "[simdata]") {
    auto [d1, s1] = cpd::gen_hd_linear(80, 6, 42);
    auto [d2, s2] = cpd::gen_hd_linear(80, 6, 42);
    CHECK((d1.y.array() == d2.y.array()).all());
    CHECK((d1.X.array() == d2.X.array()).all());
    CHECK((s1.coefs[3].array() == s2.coefs[3].array()).all());

    auto [d3, s3] = cpd::gen_hd_linear(80, 6, 43);
    CHECK((d1.y.array() != d3.y.array()).any());

    auto [u1, t1] = cpd::gen_nonparam(200, 5);
    auto [u2, t2] = cpd::gen_nonparam(200, 5);
    CHECK(u1.z == u2.z);

    auto [r1, q1] = cpd::gen_single_cp(60, 8, 9);
    auto [r2, q2] = cpd::gen_single_cp(60, 8, 9);
    CHECK((r1.y.array() == r2.y.array()).all());
}

TEST_CASE("generators validate their arguments", "[simdata]") {
    CHECK_THROWS_AS(cpd::gen_hd_linear(3, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(cpd::gen_hd_linear(100, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(cpd::gen_nonparam(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(cpd::gen_single_cp(100, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(cpd::gen_single_cp(10, 8, 0), std::invalid_argument);
}
