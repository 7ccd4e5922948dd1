#include "sarcs/radar_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sarcs {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

}  // namespace

std::size_t RadarParams::pulse_samples() const {
    // Tp * fs is integral for the usual parameter sets; the small slack keeps
    // 10e-6 * 120e6 from rounding up to 1201.
    return static_cast<std::size_t>(std::ceil(pulse_width * range_sample_rate - 1e-9));
}

RadarParams make_radar_params(const RadarSpec& spec, double nearest_range) {
    require(positive_finite(spec.platform_speed), "platform_speed must be positive");
    require(positive_finite(spec.carrier_frequency), "carrier_frequency must be positive");
    require(positive_finite(spec.wavelength), "wavelength must be positive");
    require(positive_finite(spec.pulse_width), "pulse_width must be positive");
    require(positive_finite(spec.bandwidth), "bandwidth must be positive");
    require(positive_finite(spec.range_sample_rate), "range_sample_rate must be positive");
    require(positive_finite(spec.prf), "prf must be positive");
    require(positive_finite(spec.propagation_speed), "propagation_speed must be positive");
    require(spec.azimuth_samples >= 1, "azimuth_samples must be at least 1");

    const double lambda_f0 = spec.wavelength * spec.carrier_frequency;
    require(std::abs(lambda_f0 - spec.propagation_speed) <= 1e-3 * spec.propagation_speed,
            "wavelength * carrier_frequency must equal propagation_speed (1e-3 relative)");

    RadarParams p{};
    p.platform_speed = spec.platform_speed;
    p.carrier_frequency = spec.carrier_frequency;
    p.wavelength = spec.wavelength;
    p.chirp_rate = spec.bandwidth / spec.pulse_width;
    p.pulse_width = spec.pulse_width;
    p.bandwidth = spec.bandwidth;
    p.range_sample_rate = spec.range_sample_rate;
    p.prf = spec.prf;
    p.range_samples = spec.range_samples;
    p.azimuth_samples = spec.azimuth_samples;
    p.propagation_speed = spec.propagation_speed;
    if (spec.range_window_start >= 0.0) {
        p.range_window_start = spec.range_window_start;
    } else {
        require(positive_finite(nearest_range), "nearest_range must be positive to derive tau0");
        p.range_window_start = 2.0 * nearest_range / spec.propagation_speed;
    }
    require(std::isfinite(p.range_window_start), "range_window_start must be finite");
    require(p.range_samples >= p.pulse_samples(), "range_samples must cover one pulse (ceil(Tp*fs))");
    return p;
}

RadarParams default_radar_params(double nearest_range) {
    return make_radar_params(RadarSpec{}, nearest_range);
}

double Target::zero_doppler_time(double platform_speed) const {
    if (vy == platform_speed) {
        throw std::invalid_argument("azimuth speed equals platform speed: zero-Doppler time undefined");
    }
    return y0 / (platform_speed - vy);
}

void validate_target(const Target& t, const RadarParams& params) {
    require(std::isfinite(t.x0) && std::isfinite(t.y0) && std::isfinite(t.vx) && std::isfinite(t.vy),
            "target kinematics must be finite");
    require(std::isfinite(t.reflectivity.real()) && std::isfinite(t.reflectivity.imag()),
            "target reflectivity must be finite");
    require(t.vy != params.platform_speed, "target azimuth speed equals platform speed");
}

ExtendedGrid::ExtendedGrid(const GridSpec& spec) : spec_(spec) {
    require(positive_finite(spec.bin_x) && positive_finite(spec.bin_y) && positive_finite(spec.bin_vx) &&
                positive_finite(spec.bin_vy),
            "grid bin sizes must be positive");
    require(spec.nx >= 1 && spec.ny >= 1 && spec.nvx >= 1 && spec.nvy >= 1, "grid counts must be at least 1");
    require(std::isfinite(spec.x_origin) && std::isfinite(spec.y_origin) && std::isfinite(spec.vx_origin) &&
                std::isfinite(spec.vy_origin),
            "grid origins must be finite");
}

std::size_t ExtendedGrid::flat_index(const GridCoord& c) const {
    if (!contains(c)) {
        std::ostringstream os;
        os << "grid coordinate (" << c.n1 << ", " << c.n2 << ", " << c.p << ", " << c.q << ") outside "
           << spec_.nx << "x" << spec_.ny << "x" << spec_.nvx << "x" << spec_.nvy << " grid";
        throw std::out_of_range(os.str());
    }
    return c.n1 + spec_.nx * (c.n2 + spec_.ny * (c.p + spec_.nvx * c.q));
}

GridCoord ExtendedGrid::unflatten(std::size_t flat) const {
    if (flat >= size()) {
        throw std::out_of_range("flat index outside grid");
    }
    GridCoord c;
    c.n1 = flat % spec_.nx;
    flat /= spec_.nx;
    c.n2 = flat % spec_.ny;
    flat /= spec_.ny;
    c.p = flat % spec_.nvx;
    c.q = flat / spec_.nvx;
    return c;
}

PhysicalPoint ExtendedGrid::to_physical(const GridCoord& c) const {
    return {x(c.n1), y(c.n2), vx(c.p), vy(c.q)};
}

bool ExtendedGrid::snap(const PhysicalPoint& pt, GridCoord& out, double tolerance) const {
    auto axis = [tolerance](double value, double origin, double bin, std::size_t count, std::size_t& idx) {
        const double f = (value - origin) / bin;
        const double r = std::round(f);
        if (std::abs(f - r) > tolerance || r < 0.0 || r >= static_cast<double>(count)) {
            return false;
        }
        idx = static_cast<std::size_t>(r);
        return true;
    };
    GridCoord c;
    if (!axis(pt.x, spec_.x_origin, spec_.bin_x, spec_.nx, c.n1) ||
        !axis(pt.y, spec_.y_origin, spec_.bin_y, spec_.ny, c.n2) ||
        !axis(pt.vx, spec_.vx_origin, spec_.bin_vx, spec_.nvx, c.p) ||
        !axis(pt.vy, spec_.vy_origin, spec_.bin_vy, spec_.nvy, c.q)) {
        return false;
    }
    out = c;
    return true;
}

void ExtendedGrid::check_compatible(const RadarParams& params) const {
    for (std::size_t q = 0; q < spec_.nvy; ++q) {
        require(vy(q) != params.platform_speed, "grid azimuth velocity equals platform speed");
    }
    const double c = params.propagation_speed;
    const double x_near = x(0);
    const double x_far = x(spec_.nx - 1);
    const double y_abs = std::max(std::abs(y(0)), std::abs(y(spec_.ny - 1)));
    // Two-way delays at eta = 0; a relative slack absorbs rounding in tau0 = 2 xi / c.
    const double earliest = 2.0 * x_near / c;
    const double latest = 2.0 * std::sqrt(x_far * x_far + y_abs * y_abs) / c + params.pulse_width;
    const double window_end =
        params.range_window_start + static_cast<double>(params.range_samples) / params.range_sample_rate;
    const double slack = 1e-12 * params.range_window_start;
    if (x_near <= 0.0 || earliest < params.range_window_start - slack || latest > window_end + slack) {
        std::ostringstream os;
        os << "range window [" << params.range_window_start << ", " << window_end
           << "] s does not cover grid delays [" << earliest << ", " << latest << "] s";
        throw std::invalid_argument(os.str());
    }
}

Target target_at(const ExtendedGrid& grid, const GridCoord& coord, cdouble reflectivity) {
    const auto pt = grid_to_physical(coord, grid);
    return Target{pt.x, pt.y, pt.vx, pt.vy, reflectivity};
}

}  // namespace sarcs
