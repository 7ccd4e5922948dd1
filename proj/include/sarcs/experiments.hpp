#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sarcs/dictionary.hpp"
#include "sarcs/radar_model.hpp"
#include "sarcs/recovery.hpp"

namespace sarcs {

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();
inline constexpr double kSuccessThreshold = 0.1;

enum class ExperimentMode { fig2, psr_vs_m, psr_vs_snr };
std::string to_string(ExperimentMode mode);
ExperimentMode parse_experiment_mode(const std::string& text);

struct TrialOptions {
    std::size_t max_iterations = 50;
    double stall_tolerance = 1e-6;
    CachePolicy cache_policy = CachePolicy::full_row_cache;
};

struct ExperimentSpec {
    ExperimentMode mode = ExperimentMode::psr_vs_m;
    std::vector<std::size_t> target_counts{1, 2, 3, 4};
    std::vector<std::size_t> measurement_counts{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::vector<double> snr_values_db{kNoiseless};  // kNoiseless: no noise added
    std::size_t trials_per_point = 200;
    std::uint64_t base_seed = 2010;
    TrialOptions options;

    /// Throws std::invalid_argument if a list needed by the mode is empty.
    void validate() const;
};

struct PsrPoint {
    ExperimentMode mode;
    std::size_t k;
    std::size_t measurements;
    double snr_db;
    std::size_t trials;
    std::size_t successes;
    std::size_t solver_failures;
    double psr;
    double mean_rel_error;
    std::uint64_t base_seed;
};

struct RandomScene {
    Scene scene;
    SparseProfile truth;
};

/// k distinct grid points drawn uniformly without replacement, reflectivity 1,
/// ordered by flat index.
RandomScene random_scene(std::size_t k, const ExtendedGrid& grid, std::uint64_t seed);

/// The three-target layout of the feasibility experiment, expressed in local
/// offsets from the grid origin: a static target at (4, 2.5), a 10 m/s range
/// mover at (7.5, 10) and a (4, 4) m/s mover at (11.5, 8).
RandomScene three_target_scene(const ExtendedGrid& grid);

struct TrialSeeds {
    std::uint64_t scene;
    std::uint64_t selection;
    std::uint64_t noise;
};

/// Seeds for one trial. The scene depends on (base, k, trial) only, so every
/// measurement count and SNR of a curve sees the same scenes; the selection
/// adds M and the noise adds the SNR.
TrialSeeds trial_seeds(std::uint64_t base_seed, std::size_t k, std::size_t measurements, double snr_db,
                       std::size_t trial);

struct TrialOutcome {
    bool success = false;
    bool solver_failed = false;
    double relative_error = 1.0;
    std::string failure;
    RecoveryDiagnostics diagnostics;
    SparseProfile estimate;
};

/// Simulate -> optional noise -> select M samples -> CoSaMP with k = |truth|.
/// snr_db = kNoiseless skips the noise. Throws std::invalid_argument for
/// M = 0 or M > Nr Na; solver errors are reported in the outcome instead.
TrialOutcome run_trial(const RadarParams& params, const ExtendedGrid& grid, const SparseProfile& truth,
                       std::size_t measurements, double snr_db, const TrialSeeds& seeds,
                       const TrialOptions& options = {});

/// All points of a sweep, trials run in parallel and reduced per point in a
/// fixed order so the result does not depend on the thread count.
std::vector<PsrPoint> psr_sweep(const ExperimentSpec& spec, const RadarParams& params, const ExtendedGrid& grid);

/// CSV: mode,k,M,snr_db,trials,successes,psr,mean_rel_error,base_seed
/// `comments` are emitted first, each prefixed with "# ".
void write_psr_csv(const std::vector<PsrPoint>& points, std::ostream& out,
                   const std::vector<std::string>& comments = {});

}  // namespace sarcs
