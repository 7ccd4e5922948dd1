#include "sarcs/rng.hpp"

#include <cmath>
#include <numbers>

namespace sarcs {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection of the biased low region.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::complex<double> SplitMix64::complex_normal(double variance) {
    // Box-Muller: |z|^2 is exponential with mean `variance`, phase uniform.
    const double u1 = uniform_open0();
    const double u2 = uniform_open0();
    const double r = std::sqrt(-variance * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace sarcs
