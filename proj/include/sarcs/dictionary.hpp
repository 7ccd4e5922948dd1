#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sarcs/echo_sim.hpp"
#include "sarcs/radar_model.hpp"

namespace sarcs {

/// Strictly increasing indices into vec(b), with the seed that produced them.
struct MeasurementSelection {
    std::vector<std::size_t> indices;
    std::uint64_t seed = 0;

    std::size_t size() const { return indices.size(); }
};

/// Uniform sample of `count` distinct indices from [0, total), sorted.
/// Floyd's algorithm driven by SplitMix64, so the result is identical on
/// every platform. Throws std::invalid_argument unless 1 <= count <= total.
MeasurementSelection select_measurements(std::size_t count, std::size_t total, std::uint64_t seed);

/// Unit-reflectivity atom of grid point `coord` at echo sample (m, n).
/// Equals the point echo of target_at(grid, coord) at the same sample.
cdouble atom_sample(const RadarParams& params, const ExtendedGrid& grid, const GridCoord& coord, std::size_t m,
                    std::size_t n);

struct SparseEntry {
    std::size_t index;  // flat grid index
    cdouble value;
};

enum class CachePolicy { none, full_row_cache };

/// Matrix-free dictionary restricted to the selected echo samples.
///
/// Column g is vec(d_g) restricted to the selection; row i corresponds to
/// echo sample gamma_i = m + Nr * n. Only O(M * (N1 P + N2 Q)) row geometry is
/// kept unless the full M x N restricted matrix is cached.
class SensingOperator {
public:
    SensingOperator(const RadarParams& params, const ExtendedGrid& grid, MeasurementSelection selection,
                    CachePolicy policy = CachePolicy::full_row_cache);

    const RadarParams& params() const { return params_; }
    const ExtendedGrid& grid() const { return grid_; }
    const MeasurementSelection& selection() const { return selection_; }
    CachePolicy policy() const { return policy_; }
    std::size_t rows() const { return selection_.size(); }
    std::size_t cols() const { return grid_.size(); }

    /// Entry (row, flat) of the restricted matrix.
    cdouble entry(std::size_t row, std::size_t flat) const;

    /// Restricted column `flat`, length rows().
    std::vector<cdouble> column(std::size_t flat) const;

    /// y = Phi_M x for a dense profile of length cols().
    std::vector<cdouble> forward(std::span<const cdouble> profile) const;
    /// y = Phi_M x for a sparse profile; entries are summed in the given order.
    std::vector<cdouble> forward(std::span<const SparseEntry> profile) const;
    /// x = Phi_M^H r for r of length rows().
    std::vector<cdouble> adjoint(std::span<const cdouble> residual) const;

    /// l2 norm of every restricted column.
    const std::vector<double>& column_norms() const { return norms_; }

    /// Restricted samples of an echo, in selection order.
    std::vector<cdouble> restrict(const EchoMatrix& echo) const;

    /// Persists the cached restricted matrix (magic "SARPHIM1", M and N as
    /// little-endian uint32, M x N complex float64 pairs row-major, then the M
    /// selection indices as uint64 and the selection seed). Requires the cache.
    void save_cache(const std::filesystem::path& path) const;
    /// Restores an operator saved by save_cache; checks shape against the grid
    /// and radar. Throws std::runtime_error on mismatch.
    static SensingOperator load_cache(const std::filesystem::path& path, const RadarParams& params,
                                      const ExtendedGrid& grid);

private:
    struct RowGeometry {
        double tau;
        std::vector<double> range_axis;    // x(n1) + vx(p) eta, index p * N1 + n1
        std::vector<double> azimuth_axis;  // y(n2) + (vy(q) - v) eta, index q * N2 + n2
    };

    SensingOperator(const RadarParams& params, const ExtendedGrid& grid, MeasurementSelection selection,
                    std::vector<double> cache_re, std::vector<double> cache_im);

    void build_geometry();
    void build_cache();
    void compute_norms();
    /// Atoms of row `row` for flat indices [begin, end) into re/im.
    void eval_row(std::size_t row, std::size_t begin, std::size_t end, double* re, double* im) const;

    RadarParams params_;
    ExtendedGrid grid_;
    MeasurementSelection selection_;
    CachePolicy policy_;
    std::vector<RowGeometry> geometry_;
    std::vector<double> cache_re_;  // row-major rows() x cols()
    std::vector<double> cache_im_;
    std::vector<double> norms_;
};

}  // namespace sarcs
