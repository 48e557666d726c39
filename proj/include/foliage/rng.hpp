#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "foliage/vec3.hpp"

namespace foliage {

/// Named sub-streams of the master seed. One master seed reproduces an
/// entire run; every randomized stage pulls from its own derived stream.
enum class SeedStream : std::uint64_t {
    Ipp = 1,
    Tree = 2,
    Yaw = 3,
    TreeInstance = 4,
    SweepScene = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic seed splitting: master -> (stream, index) -> child seed.
inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t index) {
    std::uint64_t s = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream)));
    return splitmix64(s ^ splitmix64(index));
}

/// Seeded generator with portable draw semantics: every distribution below is
/// built from raw mt19937_64 output, so identical seeds give identical values
/// on every standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Poisson count by accumulating unit-exponential inter-arrival times.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        double acc = 0.0;
        std::uint64_t k = 0;
        for (;;) {
            acc += -std::log1p(-uniform());
            if (acc >= mean) return k;
            ++k;
        }
    }

    /// Uniform direction on the unit sphere.
    Vec3 unit_sphere() {
        const double z = 1.0 - 2.0 * uniform();
        const double phi = 2.0 * std::acos(-1.0) * uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

private:
    std::mt19937_64 gen_;
};

} // namespace foliage
