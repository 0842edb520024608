// Seed-derived random streams for path sampling.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace koper {

// Finalizer from the splitmix64 generator; used to derive independent
// sub-stream seeds from a master seed and a tag.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return splitmix64(splitmix64(master) ^ splitmix64(tag));
}

// Thin wrapper around mt19937_64 producing doubles through fixed bit
// manipulation, so streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
    }

    // Uniform on (-pi/2, pi/2).
    double uniform_angle() {
        return 3.14159265358979323846 * (uniform01() - 0.5);
    }

    // Standard exponential, strictly positive.
    double exponential() {
        double u = uniform01();
        return -std::log(u);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace koper
