#include "sarcs/echo_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sarcs/detail/atom_kernel.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {

EchoMatrix& EchoMatrix::operator+=(const EchoMatrix& other) {
    if (other.rows() != rows() || other.cols() != cols()) {
        throw std::invalid_argument("echo shapes differ");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        samples_[i] += other.samples_[i];
    }
    return *this;
}

bool EchoMatrix::all_zero() const {
    for (const auto& s : samples_) {
        if (s != cdouble{}) return false;
    }
    return true;
}

bool EchoMatrix::all_finite() const {
    for (const auto& s : samples_) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    }
    return true;
}

double instantaneous_range(const Target& t, double eta, double platform_speed) {
    return detail::slant_range(t.x0, t.y0, t.vx, t.vy, eta, platform_speed);
}

double taylor_range(const Target& t, double eta, double platform_speed) {
    if (!(t.x0 > 0.0)) {
        throw std::invalid_argument("taylor_range needs a positive range position");
    }
    const double eta_c = t.zero_doppler_time(platform_speed);
    const double d = eta - eta_c;
    const double rel = t.vy - platform_speed;
    return t.x0 + t.vx * d + (rel * rel / (2.0 * t.x0)) * d * d;
}

void accumulate_point_echo(const Target& target, EchoMatrix& echo) {
    const RadarParams& params = echo.params();
    validate_target(target, params);
    if (target.reflectivity == cdouble{}) return;

    const detail::SampleModel model(params);
    const std::size_t nr = params.range_samples;
    const std::size_t na = params.azimuth_samples;
    std::vector<double> tau(nr);
    for (std::size_t m = 0; m < nr; ++m) tau[m] = params.range_time(m);

    const double sr = target.reflectivity.real();
    const double si = target.reflectivity.imag();
#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < na; ++n) {
        const double range = instantaneous_range(target, params.azimuth_time(n), params.platform_speed);
        const detail::SampleModel local = model;
        auto col = echo.column(n);
        for (std::size_t m = 0; m < nr; ++m) {
            double re, im;
            local.sample(tau[m], range, re, im);
            col[m] += cdouble{sr * re - si * im, sr * im + si * re};
        }
    }
}

EchoMatrix point_echo(const Target& target, const RadarParams& params) {
    EchoMatrix echo(params);
    accumulate_point_echo(target, echo);
    return echo;
}

EchoMatrix scene_echo(const Scene& scene, const RadarParams& params) {
    EchoMatrix echo(params);
    for (const auto& t : scene.targets) {
        accumulate_point_echo(t, echo);
    }
    return echo;
}

double support_power(const EchoMatrix& echo) {
    double energy = 0.0;
    std::size_t count = 0;
    for (const auto& s : echo.vec()) {
        const double p = std::norm(s);
        if (p > 0.0) {
            energy += p;
            ++count;
        }
    }
    return count == 0 ? 0.0 : energy / static_cast<double>(count);
}

double noise_variance_for_snr(const EchoMatrix& echo, double snr_db) {
    const double power = support_power(echo);
    if (power == 0.0) {
        throw std::invalid_argument("SNR undefined for an all-zero echo");
    }
    return power / std::pow(10.0, snr_db / 10.0);
}

EchoMatrix add_noise(const EchoMatrix& echo, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return echo;
    }
    const double variance = noise_variance_for_snr(echo, snr_db);
    EchoMatrix out = echo;
    SplitMix64 rng(seed);
    for (auto& s : out.vec()) {
        s += rng.complex_normal(variance);
    }
    return out;
}

}  // namespace sarcs
