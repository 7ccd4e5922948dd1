#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace sarcs {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

class ExtendedGrid;

/// Platform, waveform and sampling constants of a side-looking stripmap SAR.
///
/// Construct through make_radar_params() so that the invariants hold:
/// chirp_rate = bandwidth / pulse_width, wavelength * carrier = c,
/// range_samples covers one full pulse.
struct RadarParams {
    double platform_speed;      // v, m/s
    double carrier_frequency;   // f0, Hz
    double wavelength;          // m
    double chirp_rate;          // Kr, Hz/s
    double pulse_width;         // Tp, s
    double bandwidth;           // B, Hz
    double range_sample_rate;   // fs, Hz
    double prf;                 // fa, Hz
    std::size_t range_samples;  // Nr
    std::size_t azimuth_samples;  // Na
    double range_window_start;  // tau0, s
    double propagation_speed;   // c, m/s

    /// Fast time of range sample m.
    double range_time(std::size_t m) const {
        return range_window_start + static_cast<double>(m) / range_sample_rate;
    }

    /// Slow time of azimuth sample n. The aperture is centered so that
    /// n == azimuth_samples / 2 is eta = 0.
    double azimuth_time(std::size_t n) const {
        const auto centre = static_cast<std::int64_t>(azimuth_samples / 2);
        return static_cast<double>(static_cast<std::int64_t>(n) - centre) / prf;
    }

    double aperture_time() const { return static_cast<double>(azimuth_samples) / prf; }
    std::size_t total_samples() const { return range_samples * azimuth_samples; }
    /// Number of samples spanned by one transmitted pulse, ceil(Tp * fs).
    std::size_t pulse_samples() const;
};

/// Input to make_radar_params. Leave range_window_start unset to derive it
/// from a grid (two-way delay to the nearest grid range).
struct RadarSpec {
    double platform_speed = 250.0;
    double carrier_frequency = 9.375e9;
    double wavelength = 0.032;
    double pulse_width = 10e-6;
    double bandwidth = 100e6;
    double range_sample_rate = 120e6;
    double prf = 300.0;
    std::size_t range_samples = 1213;
    std::size_t azimuth_samples = 595;
    double propagation_speed = kSpeedOfLight;
    double range_window_start = -1.0;  // < 0: derive from grid
};

/// Validates a RadarSpec and produces RadarParams. Throws std::invalid_argument.
RadarParams make_radar_params(const RadarSpec& spec, double nearest_range);

/// The airborne X-band system used throughout the experiments, with the range
/// window opened at the two-way delay of `nearest_range`.
RadarParams default_radar_params(double nearest_range);

struct Target {
    double x0 = 0.0;  // range position at eta = 0, m
    double y0 = 0.0;  // azimuth position at eta = 0, m
    double vx = 0.0;  // range speed, m/s
    double vy = 0.0;  // azimuth speed, m/s
    cdouble reflectivity{1.0, 0.0};

    /// Zero-Doppler time y0 / (v - vy). Throws if vy == v.
    double zero_doppler_time(double platform_speed) const;
};

/// Throws std::invalid_argument if the target cannot be imaged by `params`.
void validate_target(const Target& target, const RadarParams& params);

struct Scene {
    std::vector<Target> targets;
};

struct GridCoord {
    std::size_t n1 = 0;  // range position
    std::size_t n2 = 0;  // azimuth position
    std::size_t p = 0;   // range velocity
    std::size_t q = 0;   // azimuth velocity

    friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

struct PhysicalPoint {
    double x, y, vx, vy;
};

struct GridSpec {
    double x_origin = 29992.5;
    double y_origin = 0.0;
    double vx_origin = -10.0;
    double vy_origin = -10.0;
    double bin_x = 0.5;
    double bin_y = 0.5;
    double bin_vx = 2.0;
    double bin_vy = 2.0;
    std::size_t nx = 31;
    std::size_t ny = 31;
    std::size_t nvx = 11;
    std::size_t nvy = 11;
};

/// Discretized 4-D (range, azimuth, range velocity, azimuth velocity) target
/// space. Flat indices stack the 4-D profile with n1 fastest:
/// flat = n1 + N1 * (n2 + N2 * (p + P * q)).
class ExtendedGrid {
public:
    /// Throws std::invalid_argument on non-positive bins or zero counts.
    explicit ExtendedGrid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t nx() const { return spec_.nx; }
    std::size_t ny() const { return spec_.ny; }
    std::size_t nvx() const { return spec_.nvx; }
    std::size_t nvy() const { return spec_.nvy; }
    std::size_t size() const { return spec_.nx * spec_.ny * spec_.nvx * spec_.nvy; }
    std::size_t spatial_size() const { return spec_.nx * spec_.ny; }

    double x(std::size_t n1) const { return spec_.x_origin + spec_.bin_x * static_cast<double>(n1); }
    double y(std::size_t n2) const { return spec_.y_origin + spec_.bin_y * static_cast<double>(n2); }
    double vx(std::size_t p) const { return spec_.vx_origin + spec_.bin_vx * static_cast<double>(p); }
    double vy(std::size_t q) const { return spec_.vy_origin + spec_.bin_vy * static_cast<double>(q); }

    bool contains(const GridCoord& c) const {
        return c.n1 < spec_.nx && c.n2 < spec_.ny && c.p < spec_.nvx && c.q < spec_.nvy;
    }

    /// Throws std::out_of_range for coordinates outside the grid.
    std::size_t flat_index(const GridCoord& c) const;
    /// Throws std::out_of_range for flat >= size().
    GridCoord unflatten(std::size_t flat) const;
    PhysicalPoint to_physical(const GridCoord& c) const;

    /// Finds the grid coordinate of a physical point lying on the grid to
    /// within `tolerance` bins on every axis. False if off-grid or outside.
    bool snap(const PhysicalPoint& point, GridCoord& out, double tolerance = 1e-6) const;

    /// Throws std::invalid_argument if any vy(q) equals the platform speed or
    /// the range window of `params` does not cover the grid.
    void check_compatible(const RadarParams& params) const;

private:
    GridSpec spec_;
};

inline std::size_t flat_index(const GridCoord& coord, const ExtendedGrid& grid) {
    return grid.flat_index(coord);
}

inline PhysicalPoint grid_to_physical(const GridCoord& coord, const ExtendedGrid& grid) {
    (void)grid.flat_index(coord);  // range check
    return grid.to_physical(coord);
}

/// Point target located at a grid coordinate.
Target target_at(const ExtendedGrid& grid, const GridCoord& coord, cdouble reflectivity = {1.0, 0.0});

}  // namespace sarcs
