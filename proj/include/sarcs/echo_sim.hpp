#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sarcs/radar_model.hpp"

namespace sarcs {

/// Complex baseband samples b(tau_m, eta_n), Nr x Na. Storage is column-major
/// (m fastest), which is exactly the vec ordering: entry (m, n) lives at
/// m + Nr * n.
class EchoMatrix {
public:
    explicit EchoMatrix(const RadarParams& params)
        : params_(params), samples_(params.total_samples(), cdouble{}) {}

    const RadarParams& params() const { return params_; }
    std::size_t rows() const { return params_.range_samples; }
    std::size_t cols() const { return params_.azimuth_samples; }
    std::size_t size() const { return samples_.size(); }

    cdouble& at(std::size_t m, std::size_t n) { return samples_[m + rows() * n]; }
    const cdouble& at(std::size_t m, std::size_t n) const { return samples_[m + rows() * n]; }

    /// vec(b): index m + Nr * n.
    std::span<cdouble> vec() { return samples_; }
    std::span<const cdouble> vec() const { return samples_; }
    std::span<const cdouble> column(std::size_t n) const { return vec().subspan(n * rows(), rows()); }
    std::span<cdouble> column(std::size_t n) { return vec().subspan(n * rows(), rows()); }

    EchoMatrix& operator+=(const EchoMatrix& other);
    bool all_zero() const;
    bool all_finite() const;

private:
    RadarParams params_;
    std::vector<cdouble> samples_;
};

/// Exact slant range sqrt((x + vx eta)^2 + (y + (vy - v) eta)^2).
double instantaneous_range(const Target& target, double eta, double platform_speed);

/// Second-order expansion of the slant range about the zero-Doppler time.
/// Throws std::invalid_argument if x0 <= 0 or vy == v.
double taylor_range(const Target& target, double eta, double platform_speed);

/// Unit-reflectivity-scaled echo of one target, using the exact range history,
/// a rectangular pulse envelope of width Tp and a full-aperture azimuth
/// envelope. An all-zero result means the target never falls in the window.
EchoMatrix point_echo(const Target& target, const RadarParams& params);

/// Adds the echo of `target` into `echo` in place.
void accumulate_point_echo(const Target& target, EchoMatrix& echo);

EchoMatrix scene_echo(const Scene& scene, const RadarParams& params);

/// Mean |b|^2 over samples with nonzero magnitude. Zero for an all-zero echo.
double support_power(const EchoMatrix& echo);

/// Per-sample complex noise variance giving `snr_db` over the signal support.
/// Throws std::invalid_argument for an all-zero echo.
double noise_variance_for_snr(const EchoMatrix& echo, double snr_db);

/// Adds circular complex white Gaussian noise at `snr_db` (support-power SNR).
/// snr_db = +infinity returns the echo unchanged. Deterministic per seed.
EchoMatrix add_noise(const EchoMatrix& echo, double snr_db, std::uint64_t seed);

/// Binary container: 8-byte magic "SARECHO1", Nr and Na as little-endian
/// uint32, then Nr x Na complex samples row-major (m outer), each as two
/// little-endian float64 (re, im).
void write_echo(const EchoMatrix& echo, std::ostream& out);
void save_echo(const EchoMatrix& echo, const std::filesystem::path& path);

/// Reads a container and attaches `params`. Throws std::runtime_error on a bad
/// header or a shape mismatch against params.
EchoMatrix read_echo(std::istream& in, const RadarParams& params);
EchoMatrix load_echo(const std::filesystem::path& path, const RadarParams& params);

/// Debug export: Nr lines of Na comma-separated magnitudes.
void save_echo_magnitude_csv(const EchoMatrix& echo, const std::filesystem::path& path);

namespace io {
void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f64(std::ostream& out, double v);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
double get_f64(std::istream& in);
}  // namespace io

}  // namespace sarcs
