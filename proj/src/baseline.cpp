#include "sarcs/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "sarcs/detail/atom_kernel.hpp"

namespace sarcs {

double IntensityImage::max() const {
    double m = 0.0;
    for (double p : pixels) m = std::max(m, p);
    return m;
}

std::vector<cdouble> chirp_replica(const RadarParams& params) {
    const std::size_t len = params.pulse_samples();
    std::vector<cdouble> h(len);
    const double half_kr = 0.5 * params.chirp_rate;
    for (std::size_t j = 0; j < len; ++j) {
        const double t = static_cast<double>(j) / params.range_sample_rate;
        double re, im;
        detail::unit_phasor(half_kr * t * t, re, im);
        h[j] = {re, im};
    }
    return h;
}

EchoMatrix range_compress(const EchoMatrix& echo) {
    const auto h = chirp_replica(echo.params());
    const std::size_t len = h.size();
    const std::size_t nr = echo.rows();
    std::vector<double> hr(len), hi(len);
    for (std::size_t j = 0; j < len; ++j) {
        hr[j] = h[j].real();
        hi[j] = h[j].imag();
    }
    EchoMatrix out(echo.params());
#pragma omp parallel
    {
        std::vector<double> xr(nr), xi(nr);
#pragma omp for schedule(static)
        for (std::size_t n = 0; n < echo.cols(); ++n) {
            const auto col = echo.column(n);
            bool any = false;
            for (std::size_t m = 0; m < nr; ++m) {
                xr[m] = col[m].real();
                xi[m] = col[m].imag();
                any = any || col[m] != cdouble{};
            }
            if (!any) continue;
            auto dst = out.column(n);
            for (std::size_t m = 0; m < nr; ++m) {
                const std::size_t span = std::min(len, nr - m);
                double sr = 0.0, si = 0.0;
                const double* pr = xr.data() + m;
                const double* pi = xi.data() + m;
#pragma omp simd reduction(+ : sr, si)
                for (std::size_t j = 0; j < span; ++j) {
                    // x * conj(h)
                    sr += pr[j] * hr[j] + pi[j] * hi[j];
                    si += pi[j] * hr[j] - pr[j] * hi[j];
                }
                dst[m] = {sr, si};
            }
        }
    }
    return out;
}

IntensityImage matched_filter_image(const EchoMatrix& echo, const ExtendedGrid& grid, double vx, double vy) {
    const RadarParams& params = echo.params();
    GridCoord vel;
    {
        // Snap the velocity hypothesis; positions are irrelevant here.
        const PhysicalPoint probe{grid.x(0), grid.y(0), vx, vy};
        if (!grid.snap(probe, vel)) {
            throw std::invalid_argument("velocity hypothesis is not on the velocity grid");
        }
    }
    const double hyp_vx = grid.vx(vel.p);
    const double hyp_vy = grid.vy(vel.q);

    IntensityImage image;
    image.rows = grid.nx();
    image.cols = grid.ny();
    image.pixels.assign(image.rows * image.cols, 0.0);
    image.vx = hyp_vx;
    image.vy = hyp_vy;

    const std::size_t nr = echo.rows();
    const std::size_t na = echo.cols();
    std::vector<double> er(echo.size()), ei(echo.size()), tau(nr);
    for (std::size_t k = 0; k < echo.size(); ++k) {
        er[k] = echo.vec()[k].real();
        ei[k] = echo.vec()[k].imag();
    }
    for (std::size_t m = 0; m < nr; ++m) tau[m] = params.range_time(m);
    std::vector<double> eta(na);
    for (std::size_t n = 0; n < na; ++n) eta[n] = params.azimuth_time(n);
    const detail::SampleModel model(params);

    const std::size_t pixels = image.rows * image.cols;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t pix = 0; pix < pixels; ++pix) {
        const std::size_t n1 = pix / image.cols;
        const std::size_t n2 = pix % image.cols;
        const double x = grid.x(n1);
        const double y = grid.y(n2);
        const detail::SampleModel local = model;  // keeps the constants in registers
        const double* tp = tau.data();
        double acc_re = 0.0, acc_im = 0.0, energy = 0.0;
        for (std::size_t n = 0; n < na; ++n) {
            const double range = detail::slant_range(x, y, hyp_vx, hyp_vy, eta[n], params.platform_speed);
            const double* cr = er.data() + n * nr;
            const double* ci = ei.data() + n * nr;
            double sr = 0.0, si = 0.0, se = 0.0;
#pragma omp simd reduction(+ : sr, si, se)
            for (std::size_t m = 0; m < nr; ++m) {
                double dr, di;
                local.sample(tp[m], range, dr, di);
                // b * conj(d)
                sr += cr[m] * dr + ci[m] * di;
                si += ci[m] * dr - cr[m] * di;
                se += dr * dr + di * di;
            }
            acc_re += sr;
            acc_im += si;
            energy += se;
        }
        image.pixels[pix] = energy > 0.0 ? std::hypot(acc_re, acc_im) / std::sqrt(energy) : 0.0;
    }
    return image;
}

IntensityImage profile_image(const SparseProfile& profile) {
    const auto& grid = profile.grid();
    IntensityImage image;
    image.rows = grid.nx();
    image.cols = grid.ny();
    image.pixels.assign(image.rows * image.cols, 0.0);
    for (const auto& e : profile.sparse()) {
        const auto c = grid.unflatten(e.index);
        image.at(c.n1, c.n2) += std::norm(e.value);
    }
    for (auto& p : image.pixels) p = std::sqrt(p);
    return image;
}

SidelobeMetrics sidelobe_metrics(const IntensityImage& image, const std::vector<SpatialCoord>& true_coords) {
    if (true_coords.empty()) throw std::invalid_argument("sidelobe metrics need at least one true coordinate");
    const double peak = image.pixels.empty() ? 0.0 : image.max();
    if (!(peak > 0.0)) throw std::invalid_argument("sidelobe metrics undefined for an image without energy");

    auto near_truth = [&true_coords](std::size_t n1, std::size_t n2) {
        for (const auto& c : true_coords) {
            const auto d1 = n1 > c.n1 ? n1 - c.n1 : c.n1 - n1;
            const auto d2 = n2 > c.n2 ? n2 - c.n2 : c.n2 - n2;
            if (d1 <= 1 && d2 <= 1) return true;
        }
        return false;
    };
    double sidelobe = 0.0;
    std::size_t peak_n1 = 0, peak_n2 = 0;
    bool found = false;
    for (std::size_t n1 = 0; n1 < image.rows; ++n1) {
        for (std::size_t n2 = 0; n2 < image.cols; ++n2) {
            const double v = image.at(n1, n2);
            if (!found && v == peak) {
                peak_n1 = n1;
                peak_n2 = n2;
                found = true;
            }
            if (!near_truth(n1, n2)) sidelobe = std::max(sidelobe, v);
        }
    }

    SidelobeMetrics out{};
    out.peak_sidelobe_ratio_db =
        sidelobe > 0.0 ? 20.0 * std::log10(sidelobe / peak) : -std::numeric_limits<double>::infinity();

    const double half_power = peak * std::pow(10.0, -3.0 / 20.0);
    auto extent = [&](bool along_range) {
        std::size_t width = 1;
        const std::size_t limit = along_range ? image.rows : image.cols;
        const std::size_t centre = along_range ? peak_n1 : peak_n2;
        auto value = [&](std::size_t i) { return along_range ? image.at(i, peak_n2) : image.at(peak_n1, i); };
        for (std::size_t i = centre + 1; i < limit && value(i) >= half_power; ++i) ++width;
        for (std::size_t i = centre; i-- > 0 && value(i) >= half_power;) ++width;
        return width;
    };
    out.range_width = extent(true);
    out.azimuth_width = extent(false);
    out.mainlobe_width = std::max(out.range_width, out.azimuth_width);
    return out;
}

void write_pgm(const IntensityImage& image, std::ostream& out) {
    out << "P5\n" << image.cols << ' ' << image.rows << "\n255\n";
    const double peak = image.max();
    for (double p : image.pixels) {
        const double scaled = peak > 0.0 ? std::round(255.0 * p / peak) : 0.0;
        out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0))));
    }
}

void save_pgm(const IntensityImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_pgm(image, out);
}

void write_image_csv(const IntensityImage& image, std::ostream& out) {
    out << std::setprecision(17);
    for (std::size_t n1 = 0; n1 < image.rows; ++n1) {
        for (std::size_t n2 = 0; n2 < image.cols; ++n2) {
            if (n2) out << ',';
            out << image.at(n1, n2);
        }
        out << '\n';
    }
}

void save_image_csv(const IntensityImage& image, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_image_csv(image, out);
}

}  // namespace sarcs
