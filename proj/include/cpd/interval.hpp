#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace cpd {

// Half-open integer interval (lo, hi]: the data points lo+1, ..., hi.
// Endpoints live on the grid 0..n for a series of length n.
struct Interval {
    int lo = 0;
    int hi = 0;

    int length() const { return hi - lo; }
    bool contains(const Interval& other) const {
        return lo <= other.lo && other.hi <= hi;
    }
    bool contains_point(int t) const { return lo < t && t <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
    friend auto operator<=>(const Interval&, const Interval&) = default;
};

inline std::string to_string(const Interval& I) {
    return "(" + std::to_string(I.lo) + "," + std::to_string(I.hi) + "]";
}

inline std::ostream& operator<<(std::ostream& os, const Interval& I) {
    return os << to_string(I);
}

struct IntervalHash {
    std::size_t operator()(const Interval& I) const {
        // endpoints are small non-negative ints; pack into one word
        return std::hash<std::uint64_t>{}(
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(I.lo)) << 32) |
            static_cast<std::uint32_t>(I.hi));
    }
};

}  // namespace cpd
