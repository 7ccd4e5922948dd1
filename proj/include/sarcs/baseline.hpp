#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sarcs/echo_sim.hpp"
#include "sarcs/radar_model.hpp"
#include "sarcs/recovery.hpp"

namespace sarcs {

/// Nonnegative N1 x N2 image over the spatial sub-grid, row = range bin.
struct IntensityImage {
    std::size_t rows = 0;  // N1
    std::size_t cols = 0;  // N2
    std::vector<double> pixels;  // row-major
    double vx = 0.0;  // velocity hypothesis the image was formed with
    double vy = 0.0;

    double& at(std::size_t n1, std::size_t n2) { return pixels[n1 * cols + n2]; }
    double at(std::size_t n1, std::size_t n2) const { return pixels[n1 * cols + n2]; }
    double max() const;
};

/// Correlates every azimuth column with the transmitted chirp (ceil(Tp fs)
/// samples, no window). Output sample m holds the response to a scatterer
/// whose pulse starts at range sample m.
EchoMatrix range_compress(const EchoMatrix& echo);

/// The replica used by range_compress.
std::vector<cdouble> chirp_replica(const RadarParams& params);

/// Velocity-matched correlation image:
/// pixel(n1, n2) = |<b, d_(n1,n2,p,q)>| / ||d_(n1,n2,p,q)|| over every echo
/// sample, for the velocity bin (p, q) of the hypothesis. Throws
/// std::invalid_argument if the hypothesis is off the velocity grid.
IntensityImage matched_filter_image(const EchoMatrix& echo, const ExtendedGrid& grid, double vx, double vy);

/// Collapses a sparse profile onto the spatial grid: sqrt of the summed
/// energy over all velocity bins of each (n1, n2).
IntensityImage profile_image(const SparseProfile& profile);

struct SidelobeMetrics {
    double peak_sidelobe_ratio_db;  // -infinity when nothing lies outside the mainlobe neighborhoods
    std::size_t mainlobe_width;     // max of the two axis widths
    std::size_t range_width;
    std::size_t azimuth_width;
};

struct SpatialCoord {
    std::size_t n1, n2;
};

/// PSLR: strongest pixel outside the +-1 bin neighborhoods of `true_coords`
/// relative to the global peak. Widths: contiguous bins at or above -3 dB
/// through the global peak along each axis. Throws std::invalid_argument for
/// an image without energy or an empty coordinate list.
SidelobeMetrics sidelobe_metrics(const IntensityImage& image, const std::vector<SpatialCoord>& true_coords);

/// 8-bit binary graymap (P5), max-normalized.
void write_pgm(const IntensityImage& image, std::ostream& out);
void save_pgm(const IntensityImage& image, const std::filesystem::path& path);
/// N1 lines of N2 comma-separated linear magnitudes.
void write_image_csv(const IntensityImage& image, std::ostream& out);
void save_image_csv(const IntensityImage& image, const std::filesystem::path& path);

}  // namespace sarcs
