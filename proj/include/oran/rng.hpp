#pragma once

#include <cstdint>
#include <random>

namespace oran {

/// Portable deterministic random stream: mt19937_64 plus explicit conversions,
/// so draws do not depend on the standard library's distribution objects.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    }
    bool bernoulli(double p) { return uniform() < p; }
    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace oran
