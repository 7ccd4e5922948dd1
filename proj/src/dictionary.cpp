#include "sarcs/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "sarcs/detail/atom_kernel.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {

namespace {

constexpr char kCacheMagic[8] = {'S', 'A', 'R', 'P', 'H', 'I', 'M', '1'};
// Column block handled per thread when atoms are evaluated on the fly.
constexpr std::size_t kBlock = 4096;

}  // namespace

MeasurementSelection select_measurements(std::size_t count, std::size_t total, std::uint64_t seed) {
    if (count < 1 || count > total) {
        throw std::invalid_argument("measurement count must lie in [1, " + std::to_string(total) + "], got " +
                                    std::to_string(count));
    }
    MeasurementSelection sel;
    sel.seed = seed;
    sel.indices.reserve(count);
    if (count == total) {
        for (std::size_t i = 0; i < total; ++i) sel.indices.push_back(i);
        return sel;
    }
    std::vector<unsigned char> chosen(total, 0);
    SplitMix64 rng(seed);
    for (std::size_t j = total - count; j < total; ++j) {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (chosen[t]) {
            chosen[j] = 1;
        } else {
            chosen[t] = 1;
        }
    }
    for (std::size_t i = 0; i < total; ++i) {
        if (chosen[i]) sel.indices.push_back(i);
    }
    return sel;
}

cdouble atom_sample(const RadarParams& params, const ExtendedGrid& grid, const GridCoord& coord, std::size_t m,
                    std::size_t n) {
    if (m >= params.range_samples || n >= params.azimuth_samples) {
        throw std::out_of_range("echo sample index outside the range/azimuth window");
    }
    const auto pt = grid_to_physical(coord, grid);
    const detail::SampleModel model(params);
    const double range = detail::slant_range(pt.x, pt.y, pt.vx, pt.vy, params.azimuth_time(n), params.platform_speed);
    double re, im;
    model.sample(params.range_time(m), range, re, im);
    return {re, im};
}

SensingOperator::SensingOperator(const RadarParams& params, const ExtendedGrid& grid, MeasurementSelection selection,
                                 CachePolicy policy)
    : params_(params), grid_(grid), selection_(std::move(selection)), policy_(policy) {
    if (selection_.indices.empty()) {
        throw std::invalid_argument("sensing operator needs at least one measurement");
    }
    for (std::size_t i = 0; i < selection_.indices.size(); ++i) {
        if (selection_.indices[i] >= params_.total_samples() ||
            (i > 0 && selection_.indices[i] <= selection_.indices[i - 1])) {
            throw std::invalid_argument("selection indices must be strictly increasing inside the echo");
        }
    }
    build_geometry();
    if (policy_ == CachePolicy::full_row_cache) build_cache();
    compute_norms();
}

SensingOperator::SensingOperator(const RadarParams& params, const ExtendedGrid& grid, MeasurementSelection selection,
                                 std::vector<double> cache_re, std::vector<double> cache_im)
    : params_(params),
      grid_(grid),
      selection_(std::move(selection)),
      policy_(CachePolicy::full_row_cache),
      cache_re_(std::move(cache_re)),
      cache_im_(std::move(cache_im)) {
    build_geometry();
    compute_norms();
}

void SensingOperator::build_geometry() {
    const std::size_t n1s = grid_.nx(), n2s = grid_.ny(), ps = grid_.nvx(), qs = grid_.nvy();
    const double v = params_.platform_speed;
    geometry_.resize(rows());
    for (std::size_t i = 0; i < rows(); ++i) {
        const std::size_t gamma = selection_.indices[i];
        const std::size_t m = gamma % params_.range_samples;
        const std::size_t n = gamma / params_.range_samples;
        const double eta = params_.azimuth_time(n);
        RowGeometry& g = geometry_[i];
        g.tau = params_.range_time(m);
        g.range_axis.resize(n1s * ps);
        g.azimuth_axis.resize(n2s * qs);
        // Same expressions as detail::slant_range so atoms match point echoes bitwise.
        for (std::size_t p = 0; p < ps; ++p)
            for (std::size_t n1 = 0; n1 < n1s; ++n1) g.range_axis[p * n1s + n1] = grid_.x(n1) + grid_.vx(p) * eta;
        for (std::size_t q = 0; q < qs; ++q)
            for (std::size_t n2 = 0; n2 < n2s; ++n2)
                g.azimuth_axis[q * n2s + n2] = grid_.y(n2) + (grid_.vy(q) - v) * eta;
    }
}

void SensingOperator::eval_row(std::size_t row, std::size_t begin, std::size_t end, double* re, double* im) const {
    const RowGeometry& g = geometry_[row];
    const detail::SampleModel model(params_);
    const std::size_t n1s = grid_.nx(), n2s = grid_.ny(), ps = grid_.nvx();
    const double tau = g.tau;
    std::size_t flat = begin;
    while (flat < end) {
        const std::size_t n1_start = flat % n1s;
        std::size_t rest = flat / n1s;
        const std::size_t n2 = rest % n2s;
        rest /= n2s;
        const std::size_t p = rest % ps;
        const std::size_t q = rest / ps;
        const std::size_t run = std::min(n1s - n1_start, end - flat);
        const double b = g.azimuth_axis[q * n2s + n2];
        const double bb = b * b;
        const double* a_row = g.range_axis.data() + p * n1s + n1_start;
        double* out_re = re + (flat - begin);
        double* out_im = im + (flat - begin);
#pragma omp simd
        for (std::size_t k = 0; k < run; ++k) {
            const double a = a_row[k];
            const double range = std::sqrt(a * a + bb);
            model.sample(tau, range, out_re[k], out_im[k]);
        }
        flat += run;
    }
}

void SensingOperator::build_cache() {
    const std::size_t n = cols();
    cache_re_.assign(rows() * n, 0.0);
    cache_im_.assign(rows() * n, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < rows(); ++i) {
        eval_row(i, 0, n, cache_re_.data() + i * n, cache_im_.data() + i * n);
    }
}

void SensingOperator::compute_norms() {
    const std::size_t n = cols();
    norms_.assign(n, 0.0);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel
    {
        std::vector<double> re(kBlock), im(kBlock);
#pragma omp for schedule(static)
        for (std::size_t blk = 0; blk < blocks; ++blk) {
            const std::size_t begin = blk * kBlock;
            const std::size_t end = std::min(n, begin + kBlock);
            double* acc = norms_.data() + begin;
            for (std::size_t i = 0; i < rows(); ++i) {
                const double* r;
                const double* m;
                if (!cache_re_.empty()) {
                    r = cache_re_.data() + i * n + begin;
                    m = cache_im_.data() + i * n + begin;
                } else {
                    eval_row(i, begin, end, re.data(), im.data());
                    r = re.data();
                    m = im.data();
                }
                for (std::size_t k = 0; k < end - begin; ++k) acc[k] += r[k] * r[k] + m[k] * m[k];
            }
            for (std::size_t k = 0; k < end - begin; ++k) acc[k] = std::sqrt(acc[k]);
        }
    }
}

cdouble SensingOperator::entry(std::size_t row, std::size_t flat) const {
    if (row >= rows() || flat >= cols()) throw std::out_of_range("operator entry outside matrix");
    if (!cache_re_.empty()) {
        return {cache_re_[row * cols() + flat], cache_im_[row * cols() + flat]};
    }
    double re, im;
    eval_row(row, flat, flat + 1, &re, &im);
    return {re, im};
}

std::vector<cdouble> SensingOperator::column(std::size_t flat) const {
    std::vector<cdouble> col(rows());
    for (std::size_t i = 0; i < rows(); ++i) col[i] = entry(i, flat);
    return col;
}

std::vector<cdouble> SensingOperator::restrict(const EchoMatrix& echo) const {
    if (echo.rows() != params_.range_samples || echo.cols() != params_.azimuth_samples) {
        throw std::invalid_argument("echo shape does not match the operator's radar parameters");
    }
    std::vector<cdouble> y(rows());
    const auto v = echo.vec();
    for (std::size_t i = 0; i < rows(); ++i) y[i] = v[selection_.indices[i]];
    return y;
}

std::vector<cdouble> SensingOperator::forward(std::span<const cdouble> profile) const {
    const std::size_t n = cols();
    if (profile.size() != n) throw std::invalid_argument("profile length differs from operator columns");
    std::vector<double> xr(n), xi(n);
    for (std::size_t g = 0; g < n; ++g) {
        xr[g] = profile[g].real();
        xi[g] = profile[g].imag();
    }
    std::vector<cdouble> y(rows());
#pragma omp parallel
    {
        std::vector<double> re, im;
        if (cache_re_.empty()) {
            re.resize(kBlock);
            im.resize(kBlock);
        }
#pragma omp for schedule(static)
        for (std::size_t i = 0; i < rows(); ++i) {
            double sr = 0.0, si = 0.0;
            for (std::size_t begin = 0; begin < n; begin += kBlock) {
                const std::size_t end = std::min(n, begin + kBlock);
                const double* r;
                const double* m;
                if (!cache_re_.empty()) {
                    r = cache_re_.data() + i * n + begin;
                    m = cache_im_.data() + i * n + begin;
                } else {
                    eval_row(i, begin, end, re.data(), im.data());
                    r = re.data();
                    m = im.data();
                }
                for (std::size_t k = 0; k < end - begin; ++k) {
                    const double a = xr[begin + k], b = xi[begin + k];
                    sr += r[k] * a - m[k] * b;
                    si += r[k] * b + m[k] * a;
                }
            }
            y[i] = {sr, si};
        }
    }
    return y;
}

std::vector<cdouble> SensingOperator::forward(std::span<const SparseEntry> profile) const {
    for (const auto& e : profile) {
        if (e.index >= cols()) throw std::out_of_range("sparse profile index outside grid");
    }
    std::vector<cdouble> y(rows());
    for (std::size_t i = 0; i < rows(); ++i) {
        cdouble acc{};
        for (const auto& e : profile) acc += entry(i, e.index) * e.value;
        y[i] = acc;
    }
    return y;
}

std::vector<cdouble> SensingOperator::adjoint(std::span<const cdouble> residual) const {
    if (residual.size() != rows()) throw std::invalid_argument("residual length differs from operator rows");
    const std::size_t n = cols();
    std::vector<double> out_re(n, 0.0), out_im(n, 0.0);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel
    {
        std::vector<double> re, im;
        if (cache_re_.empty()) {
            re.resize(kBlock);
            im.resize(kBlock);
        }
#pragma omp for schedule(static)
        for (std::size_t blk = 0; blk < blocks; ++blk) {
            const std::size_t begin = blk * kBlock;
            const std::size_t end = std::min(n, begin + kBlock);
            double* acc_re = out_re.data() + begin;
            double* acc_im = out_im.data() + begin;
            for (std::size_t i = 0; i < rows(); ++i) {
                const double rr = residual[i].real(), ri = residual[i].imag();
                const double* r;
                const double* m;
                if (!cache_re_.empty()) {
                    r = cache_re_.data() + i * n + begin;
                    m = cache_im_.data() + i * n + begin;
                } else {
                    eval_row(i, begin, end, re.data(), im.data());
                    r = re.data();
                    m = im.data();
                }
                // conj(phi) * residual
                for (std::size_t k = 0; k < end - begin; ++k) {
                    acc_re[k] += r[k] * rr + m[k] * ri;
                    acc_im[k] += r[k] * ri - m[k] * rr;
                }
            }
        }
    }
    std::vector<cdouble> out(n);
    for (std::size_t g = 0; g < n; ++g) out[g] = {out_re[g], out_im[g]};
    return out;
}

void SensingOperator::save_cache(const std::filesystem::path& path) const {
    if (cache_re_.empty()) throw std::logic_error("save_cache needs the full-row cache");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(kCacheMagic, sizeof kCacheMagic);
    io::put_u32(out, static_cast<std::uint32_t>(rows()));
    io::put_u32(out, static_cast<std::uint32_t>(cols()));
    for (std::size_t k = 0; k < cache_re_.size(); ++k) {
        io::put_f64(out, cache_re_[k]);
        io::put_f64(out, cache_im_[k]);
    }
    for (auto idx : selection_.indices) io::put_u64(out, idx);
    io::put_u64(out, selection_.seed);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SensingOperator SensingOperator::load_cache(const std::filesystem::path& path, const RadarParams& params,
                                            const ExtendedGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
        throw std::runtime_error("not a restricted-matrix container (bad magic)");
    }
    const std::size_t m = io::get_u32(in);
    const std::size_t n = io::get_u32(in);
    if (n != grid.size() || m == 0 || m > params.total_samples()) {
        throw std::runtime_error("cached operator shape does not match the grid/radar configuration");
    }
    std::vector<double> re(m * n), im(m * n);
    for (std::size_t k = 0; k < m * n; ++k) {
        re[k] = io::get_f64(in);
        im[k] = io::get_f64(in);
    }
    MeasurementSelection sel;
    sel.indices.resize(m);
    for (auto& idx : sel.indices) {
        idx = io::get_u64(in);
        if (idx >= params.total_samples()) throw std::runtime_error("cached selection index outside echo");
    }
    sel.seed = io::get_u64(in);
    return SensingOperator(params, grid, std::move(sel), std::move(re), std::move(im));
}

}  // namespace sarcs
