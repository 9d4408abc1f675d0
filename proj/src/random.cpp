#include "hypercal/random.hpp"

#include <algorithm>

namespace hypercal {

namespace {

std::uint64_t poisson_inversion(double mean, Xoshiro256& rng) {
    const double u = rng.uniform01();
    double p = std::exp(-mean);
    double cumulative = p;
    std::uint64_t k = 0;
    // Hard cap far beyond any plausible deviate; keeps the loop finite
    // even for a u pathologically close to 1.
    const std::uint64_t cap =
        static_cast<std::uint64_t>(mean + 60.0 * std::sqrt(mean) + 100.0);
    while (u > cumulative && k < cap) {
        ++k;
        p *= mean / static_cast<double>(k);
        cumulative += p;
    }
    return k;
}

} // namespace

std::uint64_t poisson_sample(double mean, Xoshiro256& rng) {
    if (!(mean > 0.0))
        return 0;
    if (mean > 1000.0) {
        const double v = std::nearbyint(mean + std::sqrt(mean) * rng.gaussian());
        return v < 0.0 ? 0 : static_cast<std::uint64_t>(v);
    }
    std::uint64_t total = 0;
    double remaining = mean;
    while (remaining > 500.0) {
        total += poisson_inversion(500.0, rng);
        remaining -= 500.0;
    }
    return total + poisson_inversion(remaining, rng);
}

} // namespace hypercal
