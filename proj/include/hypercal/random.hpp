#ifndef HYPERCAL_RANDOM_HPP
#define HYPERCAL_RANDOM_HPP

#include <cmath>
#include <cstdint>

namespace hypercal {

// Self-contained PRNG (splitmix64 seeding a xoshiro256**). The standard
// library distributions are implementation-defined, so everything that
// must be bit-reproducible across runs and thread counts goes through
// this generator instead.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_)
            word = splitmix64(sm);
    }

    // Independent stream for one pixel/step of a seeded run.
    static Xoshiro256 for_index(std::uint64_t seed, std::uint64_t index) {
        return Xoshiro256(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
    }

    std::uint64_t operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    // One standard normal deviate (Box-Muller, no caching so the stream
    // layout is fixed: two uniforms per call).
    double gaussian() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// Poisson deviate: sequential-search inversion for small means (means
// above 500 are split into chunks so exp(-mean) stays normal), normal
// approximation above 1000.
std::uint64_t poisson_sample(double mean, Xoshiro256& rng);

} // namespace hypercal

#endif
