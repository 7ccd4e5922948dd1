#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace sarcs {

/// SplitMix64 finalizer. Used both as the PRNG output function and as the
/// portable hash for deriving per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive hash of a list of 64-bit words.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto w : words) {
        h = mix64(h ^ mix64(w + 0x9e3779b97f4a7c15ULL));
    }
    return h;
}

/// Counter-based SplitMix64 generator: output i is mix64(seed + (i+1) * golden).
/// Bit-identical across platforms and compilers; no std distributions are used
/// anywhere randomness affects results.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in (0, 1], 53-bit resolution.
    double uniform_open0() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);

private:
    std::uint64_t state_;
};

}  // namespace sarcs
