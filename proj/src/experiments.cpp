#include "sarcs/experiments.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "sarcs/echo_sim.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {

std::string to_string(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::fig2: return "fig2";
        case ExperimentMode::psr_vs_m: return "psr_vs_m";
        case ExperimentMode::psr_vs_snr: return "psr_vs_snr";
    }
    return "unknown";
}

ExperimentMode parse_experiment_mode(const std::string& text) {
    if (text == "fig2") return ExperimentMode::fig2;
    if (text == "psr_vs_m") return ExperimentMode::psr_vs_m;
    if (text == "psr_vs_snr") return ExperimentMode::psr_vs_snr;
    throw std::invalid_argument("unknown experiment mode '" + text + "' (fig2, psr_vs_m, psr_vs_snr)");
}

void ExperimentSpec::validate() const {
    if (trials_per_point < 1) throw std::invalid_argument("trials_per_point must be at least 1");
    if (target_counts.empty()) throw std::invalid_argument("target_counts must not be empty");
    if (measurement_counts.empty()) throw std::invalid_argument("measurement_counts must not be empty");
    if (mode == ExperimentMode::psr_vs_snr && snr_values_db.empty()) {
        throw std::invalid_argument("snr_values_db must not be empty for psr_vs_snr");
    }
    for (auto m : measurement_counts) {
        if (m == 0) throw std::invalid_argument("measurement counts must be positive");
    }
}

RandomScene random_scene(std::size_t k, const ExtendedGrid& grid, std::uint64_t seed) {
    if (k > grid.size()) throw std::invalid_argument("more targets than grid points");
    RandomScene out{Scene{}, SparseProfile(grid)};
    if (k == 0) return out;
    const auto picks = select_measurements(k, grid.size(), seed);
    for (auto flat : picks.indices) {
        const auto coord = grid.unflatten(flat);
        out.truth.add(coord, {1.0, 0.0});
        out.scene.targets.push_back(target_at(grid, coord));
    }
    return out;
}

RandomScene three_target_scene(const ExtendedGrid& grid) {
    struct Local {
        double x, y, vx, vy;
    };
    constexpr Local layout[] = {{4.0, 2.5, 0.0, 0.0}, {7.5, 10.0, 10.0, 0.0}, {11.5, 8.0, 4.0, 4.0}};
    RandomScene out{Scene{}, SparseProfile(grid)};
    for (const auto& t : layout) {
        const PhysicalPoint pt{grid.spec().x_origin + t.x, grid.spec().y_origin + t.y, t.vx, t.vy};
        GridCoord c;
        if (!grid.snap(pt, c)) throw std::invalid_argument("three-target layout does not fit the grid");
        out.truth.add(c, {1.0, 0.0});
        out.scene.targets.push_back(target_at(grid, c));
    }
    return out;
}

TrialSeeds trial_seeds(std::uint64_t base_seed, std::size_t k, std::size_t measurements, double snr_db,
                       std::size_t trial) {
    const std::uint64_t snr_bits = std::bit_cast<std::uint64_t>(snr_db);
    TrialSeeds s;
    s.scene = derive_seed({base_seed, 1, k, trial});
    s.selection = derive_seed({base_seed, 2, k, measurements, trial});
    s.noise = derive_seed({base_seed, 3, k, measurements, snr_bits, trial});
    return s;
}

TrialOutcome run_trial(const RadarParams& params, const ExtendedGrid& grid, const SparseProfile& truth,
                       std::size_t measurements, double snr_db, const TrialSeeds& seeds,
                       const TrialOptions& options) {
    if (measurements == 0 || measurements > params.total_samples()) {
        throw std::invalid_argument("measurement count must lie in [1, Nr*Na]");
    }
    TrialOutcome out{false, false, 1.0, {}, {}, SparseProfile(grid)};
    try {
        EchoMatrix echo = scene_echo(truth.to_scene(), params);
        double noise_variance = 0.0;
        if (!(std::isinf(snr_db) && snr_db > 0.0)) {
            noise_variance = noise_variance_for_snr(echo, snr_db);
            echo = add_noise(echo, snr_db, seeds.noise);
        }
        const SensingOperator op(params, grid, select_measurements(measurements, params.total_samples(), seeds.selection),
                                 options.cache_policy);
        const auto y = op.restrict(echo);
        RecoveryConfig cfg;
        cfg.sparsity = truth.size();
        cfg.max_iterations = options.max_iterations;
        cfg.stall_tolerance = options.stall_tolerance;
        cfg.residual_threshold = noise_variance > 0.0
                                     ? std::sqrt(static_cast<double>(measurements) * noise_variance)
                                     : noiseless_threshold(y);
        auto result = cosamp(op, y, cfg);
        out.relative_error = relative_error(result.profile, truth);
        out.success = out.relative_error < kSuccessThreshold;
        out.diagnostics = std::move(result.diagnostics);
        out.estimate = std::move(result.profile);
    } catch (const std::exception& ex) {
        out.solver_failed = true;
        out.success = false;
        out.relative_error = 1.0;
        out.failure = ex.what();
    }
    return out;
}

namespace {

struct PointKey {
    std::size_t k;
    std::size_t measurements;
    double snr_db;
};

std::vector<PointKey> sweep_points(const ExperimentSpec& spec) {
    std::vector<PointKey> points;
    switch (spec.mode) {
        case ExperimentMode::psr_vs_m: {
            const double snr = spec.snr_values_db.empty() ? kNoiseless : spec.snr_values_db.front();
            for (auto k : spec.target_counts)
                for (auto m : spec.measurement_counts) points.push_back({k, m, snr});
            break;
        }
        case ExperimentMode::psr_vs_snr: {
            const auto k = spec.target_counts.front();
            for (auto m : spec.measurement_counts)
                for (auto snr : spec.snr_values_db) points.push_back({k, m, snr});
            break;
        }
        case ExperimentMode::fig2:
            throw std::invalid_argument("fig2 is a single imaging run, not a PSR sweep");
    }
    return points;
}

}  // namespace

std::vector<PsrPoint> psr_sweep(const ExperimentSpec& spec, const RadarParams& params, const ExtendedGrid& grid) {
    spec.validate();
    for (auto m : spec.measurement_counts) {
        if (m > params.total_samples()) throw std::invalid_argument("measurement count exceeds Nr*Na");
    }
    const auto points = sweep_points(spec);
    const std::size_t trials = spec.trials_per_point;
    const std::size_t tasks = points.size() * trials;

    struct TaskResult {
        bool success;
        bool failed;
        double rel_error;
    };
    std::vector<TaskResult> results(tasks);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t task = 0; task < tasks; ++task) {
        const auto& pt = points[task / trials];
        const std::size_t trial = task % trials;
        const auto seeds = trial_seeds(spec.base_seed, pt.k, pt.measurements, pt.snr_db, trial);
        TaskResult r{false, true, 1.0};  // an empty scene cannot be recovered
        if (pt.k > 0) {
            const auto scene = random_scene(pt.k, grid, seeds.scene);
            const auto outcome = run_trial(params, grid, scene.truth, pt.measurements, pt.snr_db, seeds, spec.options);
            r = {outcome.success, outcome.solver_failed, outcome.relative_error};
        }
        results[task] = r;
    }

    std::vector<PsrPoint> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        PsrPoint p{spec.mode, points[i].k, points[i].measurements, points[i].snr_db, trials, 0, 0, 0.0, 0.0,
                   spec.base_seed};
        double err_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto& r = results[i * trials + t];
            p.successes += r.success ? 1 : 0;
            p.solver_failures += r.failed ? 1 : 0;
            err_sum += r.rel_error;
        }
        p.psr = static_cast<double>(p.successes) / static_cast<double>(trials);
        p.mean_rel_error = err_sum / static_cast<double>(trials);
        out.push_back(p);
    }
    return out;
}

void write_psr_csv(const std::vector<PsrPoint>& points, std::ostream& out, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "mode,k,M,snr_db,trials,successes,psr,mean_rel_error,base_seed\n";
    char buf[256];
    for (const auto& p : points) {
        char snr[32];
        if (std::isinf(p.snr_db)) {
            std::snprintf(snr, sizeof snr, "%s", p.snr_db > 0 ? "inf" : "-inf");
        } else {
            std::snprintf(snr, sizeof snr, "%.6g", p.snr_db);
        }
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%s,%zu,%zu,%.4f,%.6e,%llu\n", to_string(p.mode).c_str(), p.k,
                      p.measurements, snr, p.trials, p.successes, p.psr, p.mean_rel_error,
                      static_cast<unsigned long long>(p.base_seed));
        out << buf;
    }
}

}  // namespace sarcs
