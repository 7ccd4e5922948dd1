#pragma once

#include <cmath>
#include <cstddef>

#include "sarcs/radar_model.hpp"

// Shared sample kernel for echo synthesis, dictionary atoms and the matched
// filter. Every path evaluates the same expressions in the same order, so a
// point echo and the atom of the same grid point agree bit-for-bit.

namespace sarcs::detail {

/// exp(j 2 pi cycles) without calling libm. Reduces to the nearest quarter
/// cycle, evaluates degree-16/17 Taylor polynomials on [-pi/4, pi/4] (error
/// below 1e-15) and rotates by the quadrant. Branch-free so loops vectorize.
inline void unit_phasor(double cycles, double& re, double& im) {
    const double k = std::floor(cycles * 4.0 + 0.5);
    const double x = (cycles - k * 0.25) * 6.283185307179586476925;
    const double x2 = x * x;
    const double s =
        x * (1.0 + x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040 + x2 * (1.0 / 362880 +
        x2 * (-1.0 / 39916800 + x2 * (1.0 / 6227020800.0 + x2 * (-1.0 / 1307674368000.0))))))));
    const double c =
        1.0 + x2 * (-0.5 + x2 * (1.0 / 24 + x2 * (-1.0 / 720 + x2 * (1.0 / 40320 + x2 * (-1.0 / 3628800 +
        x2 * (1.0 / 479001600 + x2 * (-1.0 / 87178291200.0 + x2 * (1.0 / 20922789888000.0))))))));
    const double quadrant = k - 4.0 * std::floor(k * 0.25);  // 0..3
    const double odd = quadrant - 2.0 * std::floor(quadrant * 0.5);
    const double upper = std::floor(quadrant * 0.5);
    const double a = c + odd * (s - c);  // odd ? s : c
    const double b = s + odd * (c - s);  // odd ? c : s
    const double sign_upper = 1.0 - 2.0 * upper;
    // quadrant 0: (c, s), 1: (-s, c), 2: (-c, -s), 3: (s, -c)
    re = sign_upper * (1.0 - 2.0 * odd) * a;
    im = sign_upper * b;
}

/// Exact slant range of a uniformly moving point at slow time eta.
inline double slant_range(double x, double y, double vx, double vy, double eta, double platform_speed) {
    const double a = x + vx * eta;
    const double b = y + (vy - platform_speed) * eta;
    return std::sqrt(a * a + b * b);
}

/// Per-radar constants of the baseband sample model
/// s = rect_[0,Tp)(t) exp(j pi Kr t^2) exp(-j 4 pi f0 R / c),  t = tau - 2R/c.
struct SampleModel {
    double two_over_c;
    double pulse_width;
    double half_chirp_rate;     // Kr / 2, cycles / s^2
    double carrier_per_metre;   // 2 f0 / c, cycles / m

    explicit SampleModel(const RadarParams& p)
        : two_over_c(2.0 / p.propagation_speed),
          pulse_width(p.pulse_width),
          half_chirp_rate(0.5 * p.chirp_rate),
          carrier_per_metre(2.0 * p.carrier_frequency / p.propagation_speed) {}

    /// Unit-reflectivity sample at fast time `tau` for slant range `range`.
    /// The rectangular range envelope is applied as a 0/1 multiplier.
    void sample(double tau, double range, double& re, double& im) const {
        const double t = tau - two_over_c * range;
        const double inside = (t >= 0.0 && t < pulse_width) ? 1.0 : 0.0;
        const double cycles = half_chirp_rate * t * t - carrier_per_metre * range;
        unit_phasor(cycles, re, im);
        re *= inside;
        im *= inside;
    }
};

}  // namespace sarcs::detail
