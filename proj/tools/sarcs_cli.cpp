// sarcs: simulate SAR echoes of moving point targets and image them by
// compressive sensing or by a velocity-hypothesis matched filter.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sarcs/baseline.hpp"
#include "sarcs/config.hpp"
#include "sarcs/dictionary.hpp"
#include "sarcs/echo_sim.hpp"
#include "sarcs/experiments.hpp"
#include "sarcs/parallel.hpp"
#include "sarcs/recovery.hpp"

namespace fs = std::filesystem;
using namespace sarcs;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kIoError = 2, kNumericError = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void prepare_output(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output.directory, ec);
    if (ec) throw IoError("cannot create " + cfg.output.directory.string() + ": " + ec.message());
    auto out = open_out(cfg.output.directory / "effective_config.ini");
    write_config(cfg, out);
}

struct BuiltScene {
    Scene scene;
    std::optional<SparseProfile> truth;  // set when every target lies on the grid
};

BuiltScene build_scene(const RunConfig& cfg, const ExtendedGrid& grid) {
    if (cfg.scene.random_targets > 0) {
        auto r = random_scene(cfg.scene.random_targets, grid, cfg.scene.random_seed);
        return {std::move(r.scene), std::move(r.truth)};
    }
    BuiltScene out{Scene{cfg.scene.targets}, SparseProfile(grid)};
    for (const auto& t : cfg.scene.targets) {
        GridCoord c;
        if (!grid.snap({t.x0, t.y0, t.vx, t.vy}, c)) {
            out.truth.reset();
            break;
        }
        out.truth->add(c, t.reflectivity);
    }
    return out;
}

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

int cmd_simulate(const RunConfig& cfg) {
    const auto params = cfg.radar_params();
    const auto grid = cfg.make_grid();
    const auto built = build_scene(cfg, grid);
    prepare_output(cfg);

    EchoMatrix echo = scene_echo(built.scene, params);
    if (!built.scene.targets.empty() && echo.all_zero()) {
        std::cerr << "warning: every target falls outside the range window; the echo is all zero\n";
    }
    if (!std::isinf(cfg.scene.snr_db)) {
        if (echo.all_zero()) throw std::invalid_argument("SNR is undefined for an all-zero echo");
        echo = add_noise(echo, cfg.scene.snr_db, cfg.scene.noise_seed);
    }
    save_echo(echo, cfg.output.directory / "echo.bin");
    if (cfg.output.echo_csv) save_echo_magnitude_csv(echo, cfg.output.directory / "echo_magnitude.csv");
    if (built.truth) {
        auto out = open_out(cfg.output.directory / "truth.csv");
        write_truth_csv(*built.truth, out);
    } else {
        std::cerr << "warning: some targets are off the grid; truth.csv not written\n";
    }
    std::cout << "simulate: " << built.scene.targets.size() << " target(s), echo " << echo.rows() << " x "
              << echo.cols() << " -> " << (cfg.output.directory / "echo.bin").string() << '\n';
    return kOk;
}

/// Noise norm expected in the selected samples for the configured SNR; the
/// clean echo is re-simulated from the scene section to fix the noise power.
double auto_threshold(const RunConfig& cfg, const RadarParams& params, const ExtendedGrid& grid,
                      std::span<const cdouble> y) {
    if (std::isinf(cfg.scene.snr_db)) return noiseless_threshold(y);
    const auto built = build_scene(cfg, grid);
    const EchoMatrix clean = scene_echo(built.scene, params);
    if (clean.all_zero()) return noiseless_threshold(y);
    const double variance = noise_variance_for_snr(clean, cfg.scene.snr_db);
    return std::sqrt(static_cast<double>(y.size()) * variance);
}

struct CsRun {
    RecoveryResult result;
    std::size_t measurements;
    double threshold;
};

CsRun recover(const RunConfig& cfg, const EchoMatrix& echo, const ExtendedGrid& grid) {
    const auto& params = echo.params();
    if (cfg.recovery.measurements > params.total_samples()) {
        throw std::invalid_argument("measurements (" + std::to_string(cfg.recovery.measurements) +
                                    ") exceed the echo size Nr*Na = " + std::to_string(params.total_samples()));
    }
    const SensingOperator op(params, grid,
                             select_measurements(cfg.recovery.measurements, params.total_samples(),
                                                 cfg.recovery.selection_seed),
                             cfg.recovery.cache_policy);
    const auto y = op.restrict(echo);
    RecoveryConfig rc;
    rc.max_iterations = cfg.recovery.max_iterations;
    rc.stall_tolerance = cfg.recovery.stall_tolerance;
    rc.residual_threshold =
        cfg.recovery.residual_threshold ? *cfg.recovery.residual_threshold : auto_threshold(cfg, params, grid, y);
    bool zero = true;
    for (const auto& v : y) zero = zero && v == cdouble{};
    if (zero) {
        RecoveryDiagnostics d;
        d.halt = HaltReason::residual_below_threshold;
        return {{SparseProfile(grid), d}, y.size(), rc.residual_threshold};
    }
    if (cfg.recovery.sparsity == 0) {
        return {cosamp_auto(op, y, rc, cfg.recovery.max_sparsity), y.size(), rc.residual_threshold};
    }
    rc.sparsity = cfg.recovery.sparsity;
    return {cosamp(op, y, rc), y.size(), rc.residual_threshold};
}

void write_cs_outputs(const RunConfig& cfg, const CsRun& run, const std::optional<SparseProfile>& truth,
                      std::ostream& summary) {
    const auto& dir = cfg.output.directory;
    {
        auto out = open_out(dir / "recovered.csv");
        write_profile_csv(run.result.profile, out);
    }
    {
        auto out = open_out(dir / "diagnostics.csv");
        write_diagnostics_csv(run.result.diagnostics, out);
    }
    const auto image = profile_image(run.result.profile);
    save_pgm(image, dir / "cs_image.pgm");
    save_image_csv(image, dir / "cs_image.csv");

    const auto& d = run.result.diagnostics;
    summary << "image-cs: M=" << run.measurements << " k=" << run.result.profile.size()
            << " iterations=" << d.iterations.size() << " halt=" << to_string(d.halt)
            << " residual=" << d.final_residual_norm << " threshold=" << run.threshold;
    if (truth && !truth->empty()) summary << " relative_error=" << relative_error(run.result.profile, *truth);
    summary << '\n';
    if (image.max() > 0.0) {
        std::vector<SpatialCoord> coords;
        for (const auto& e : (truth && !truth->empty() ? *truth : run.result.profile).entries()) {
            coords.push_back({e.coord.n1, e.coord.n2});
        }
        const auto m = sidelobe_metrics(image, coords);
        summary << "image-cs: pslr_db=" << fmt_g(m.peak_sidelobe_ratio_db) << " mainlobe_width=" << m.mainlobe_width
                << '\n';
    }
    for (const auto& e : run.result.profile.entries()) {
        const auto p = run.result.profile.grid().to_physical(e.coord);
        summary << "  target x=" << p.x << " y=" << p.y << " vx=" << p.vx << " vy=" << p.vy
                << " |a|=" << std::abs(e.value) << '\n';
    }
}

std::optional<SparseProfile> load_truth(const std::string& path, const ExtendedGrid& grid) {
    if (path.empty()) return std::nullopt;
    try {
        return load_profile_csv(path, grid);
    } catch (const std::runtime_error& ex) {
        throw IoError(ex.what());
    }
}

EchoMatrix load_echo_file(const std::string& path, const RadarParams& params) {
    try {
        return load_echo(path, params);
    } catch (const std::runtime_error& ex) {
        throw IoError(path + ": " + ex.what());
    }
}

int cmd_image_cs(const RunConfig& cfg, const std::string& echo_path, const std::string& truth_path) {
    const auto params = cfg.radar_params();
    const auto grid = cfg.make_grid();
    const auto echo = load_echo_file(echo_path, params);
    const auto truth = load_truth(truth_path, grid);
    prepare_output(cfg);
    const auto run = recover(cfg, echo, grid);
    std::ostringstream summary;
    write_cs_outputs(cfg, run, truth, summary);
    auto out = open_out(cfg.output.directory / "summary_cs.txt");
    out << summary.str();
    std::cout << summary.str();
    return kOk;
}

void write_mf_outputs(const RunConfig& cfg, const EchoMatrix& echo, const ExtendedGrid& grid,
                      const std::optional<SparseProfile>& truth, std::ostream& summary) {
    for (const auto& [vx, vy] : cfg.baseline.velocity_hypotheses) {
        const auto image = matched_filter_image(echo, grid, vx, vy);
        const std::string stem = "mf_vx" + fmt_g(image.vx) + "_vy" + fmt_g(image.vy);
        save_pgm(image, cfg.output.directory / (stem + ".pgm"));
        save_image_csv(image, cfg.output.directory / (stem + ".csv"));
        summary << "image-mf: hypothesis vx=" << image.vx << " vy=" << image.vy;
        if (image.max() > 0.0) {
            std::vector<SpatialCoord> coords;
            if (truth && !truth->empty()) {
                for (const auto& e : truth->entries()) coords.push_back({e.coord.n1, e.coord.n2});
            } else {
                std::size_t arg = 0;
                for (std::size_t i = 1; i < image.pixels.size(); ++i) {
                    if (image.pixels[i] > image.pixels[arg]) arg = i;
                }
                coords.push_back({arg / image.cols, arg % image.cols});
            }
            const auto m = sidelobe_metrics(image, coords);
            summary << " peak=" << image.max() << " pslr_db=" << fmt_g(m.peak_sidelobe_ratio_db)
                    << " mainlobe_width=" << m.mainlobe_width;
        } else {
            summary << " (no energy)";
        }
        summary << " -> " << stem << ".pgm\n";
    }
}

int cmd_image_mf(const RunConfig& cfg, const std::string& echo_path, const std::string& truth_path) {
    const auto params = cfg.radar_params();
    const auto grid = cfg.make_grid();
    const auto echo = load_echo_file(echo_path, params);
    const auto truth = load_truth(truth_path, grid);
    prepare_output(cfg);
    std::ostringstream summary;
    write_mf_outputs(cfg, echo, grid, truth, summary);
    auto out = open_out(cfg.output.directory / "summary_mf.txt");
    out << summary.str();
    std::cout << summary.str();
    return kOk;
}

int run_fig2(const RunConfig& cfg) {
    cmd_simulate(cfg);
    const auto params = cfg.radar_params();
    const auto grid = cfg.make_grid();
    const auto echo = load_echo_file((cfg.output.directory / "echo.bin").string(), params);
    const auto truth = build_scene(cfg, grid).truth;
    std::ostringstream summary;
    write_cs_outputs(cfg, recover(cfg, echo, grid), truth, summary);
    write_mf_outputs(cfg, echo, grid, truth, summary);
    auto out = open_out(cfg.output.directory / "summary.txt");
    out << summary.str();
    std::cout << summary.str();
    return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.experiment.mode == ExperimentMode::fig2) return run_fig2(cfg);
    const auto params = cfg.radar_params();
    const auto grid = cfg.make_grid();
    prepare_output(cfg);
    const auto points = psr_sweep(cfg.experiment, params, grid);
    std::ostringstream effective;
    write_config(cfg, effective);
    std::vector<std::string> comments;
    std::string line;
    std::istringstream lines(effective.str());
    while (std::getline(lines, line)) {
        if (!line.empty()) comments.push_back(line);
    }
    auto out = open_out(cfg.output.directory / "psr.csv");
    write_psr_csv(points, out, comments);
    write_psr_csv(points, std::cout);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressive-sensing imaging of moving targets in SAR"};
    app.require_subcommand(1);

    std::string config_path, echo_path, truth_path, out_dir;
    int threads = -1;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out_dir, "output directory (overrides [output] directory)");
        sub->add_option("-j,--threads", threads, "worker threads (overrides [run] threads; 0 = all cores)");
    };
    auto* simulate = app.add_subcommand("simulate", "simulate the raw echo of the configured scene");
    add_common(simulate);
    auto* image_cs = app.add_subcommand("image-cs", "recover the sparse 4-D profile from an echo by CoSaMP");
    add_common(image_cs);
    auto* image_mf = app.add_subcommand("image-mf", "matched-filter images for the configured velocity hypotheses");
    add_common(image_mf);
    for (auto* sub : {image_cs, image_mf}) {
        sub->add_option("-e,--echo", echo_path, "echo container written by simulate")->required();
        sub->add_option("-t,--truth", truth_path, "truth profile CSV for error and sidelobe reporting");
    }
    auto* sweep = app.add_subcommand("sweep", "run the configured experiment (fig2, psr_vs_m, psr_vs_snr)");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        if (threads >= 0) cfg.threads = threads;
        if (cfg.threads > 0) set_thread_count(cfg.threads);

        if (simulate->parsed()) return cmd_simulate(cfg);
        if (image_cs->parsed()) return cmd_image_cs(cfg, echo_path, truth_path);
        if (image_mf->parsed()) return cmd_image_mf(cfg, echo_path, truth_path);
        return cmd_sweep(cfg);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return kConfigError;
    } catch (const IoError& ex) {
        std::cerr << "I/O error: " << ex.what() << '\n';
        return kIoError;
    } catch (const std::runtime_error& ex) {
        std::cerr << "I/O error: " << ex.what() << '\n';
        return kIoError;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kNumericError;
    }
}
