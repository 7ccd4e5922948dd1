#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sarcs/dictionary.hpp"
#include "sarcs/experiments.hpp"
#include "sarcs/radar_model.hpp"

namespace sarcs {

/// Configuration problem, addressed by line or by [section] key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SceneSection {
    std::vector<Target> targets;     // absolute coordinates
    std::size_t random_targets = 0;  // > 0: draw this many on-grid targets instead
    std::uint64_t random_seed = 1;
    double snr_db = kNoiseless;
    std::uint64_t noise_seed = 1;
};

struct RecoverySection {
    std::size_t sparsity = 0;  // 0: increase k until the residual threshold is met
    std::size_t max_sparsity = 8;
    std::size_t measurements = 100;
    std::uint64_t selection_seed = 1;
    std::size_t max_iterations = 50;
    double stall_tolerance = 1e-6;
    std::optional<double> residual_threshold;  // unset: 1e-6 ||y|| or the noise norm
    CachePolicy cache_policy = CachePolicy::full_row_cache;
};

struct BaselineSection {
    std::vector<std::pair<double, double>> velocity_hypotheses{{0.0, 0.0}};
};

struct OutputSection {
    std::filesystem::path directory = "out";
    bool echo_csv = false;
};

/// Everything a CLI run needs. Defaults reproduce the airborne X-band system
/// and the 31 x 31 x 11 x 11 grid (0.5 m, 0.5 m, 2 m/s, 2 m/s bins).
struct RunConfig {
    RadarSpec radar;
    GridSpec grid;
    SceneSection scene;
    RecoverySection recovery;
    ExperimentSpec experiment;
    BaselineSection baseline;
    OutputSection output;
    int threads = 0;

    ExtendedGrid make_grid() const { return ExtendedGrid(grid); }
    /// Radar parameters with tau0 derived from the grid when not given.
    /// Throws ConfigError if the radar and grid are inconsistent.
    RadarParams radar_params() const;
};

/// Parses INI text ([radar], [grid], [scene], [recovery], [experiment],
/// [baseline], [output], [run]). Unknown sections or keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Writes the effective configuration (defaults applied) as INI text that
/// parse_config reads back to the same RunConfig.
void write_config(const RunConfig& config, std::ostream& out);

}  // namespace sarcs
