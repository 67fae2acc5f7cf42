#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cpd {

// splitmix64 step; used to derive independent per-replication seeds from one
// base seed so replication r is reproducible in isolation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 1));
}

// mt19937_64 wrapper with hand-rolled distributions.  std::normal_distribution
// and friends are implementation-defined, which would tie golden outputs to one
// standard library; these transforms pin the exact stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform on [0, 1) with 53-bit resolution
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // inclusive integer range; modulo bias is irrelevant at our range sizes
    // and keeps the draw one-call deterministic
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Box-Muller; the spare keeps draws-per-call deterministic at one pair per
    // two normals
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    double chi_squared(int df) {
        double s = 0.0;
        for (int i = 0; i < df; ++i) {
            const double z = normal();
            s += z * z;
        }
        return s;
    }

    static constexpr const char* kind() { return "mt19937_64"; }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace cpd
