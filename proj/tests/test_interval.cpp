#include <catch2/catch_amalgamated.hpp>

#include "cpd/interval.hpp"

using cpd::Interval;

TEST_CASE("interval length and containment", "[interval]") {
    const Interval I{3, 10};
    CHECK(I.length() == 7);
    CHECK(I.contains({3, 10}));
    CHECK(I.contains({5, 9}));
    CHECK_FALSE(I.contains({2, 9}));
    CHECK_FALSE(I.contains({5, 11}));

    CHECK_FALSE(I.contains_point(3));  // half-open on the left
    CHECK(I.contains_point(4));
    CHECK(I.contains_point(10));
    CHECK_FALSE(I.contains_point(11));
}

TEST_CASE("interval ordering and formatting", "[interval]") {
    CHECK(Interval{1, 5} == Interval{1, 5});
    CHECK(Interval{1, 5} < Interval{1, 6});
    CHECK(Interval{1, 5} < Interval{2, 3});
    CHECK(cpd::to_string({0, 40}) == "(0,40]");
}

TEST_CASE("interval hashing distinguishes endpoints", "[interval]") {
    const cpd::IntervalHash h;
    CHECK(h({0, 5}) != h({5, 0}));
    CHECK(h({1, 2}) == h({1, 2}));
}
