#include "sarcs/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sarcs {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) {
    throw ConfigError("[" + section + "] " + key + ": " + what);
}

double to_double(const std::string& section, const std::string& key, const std::string& text) {
    const auto t = lower(trim(text));
    if (t == "inf" || t == "+inf" || t == "none") return kNoiseless;
    if (t == "-inf") return -kNoiseless;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(section, key, "expected a number, got '" + text + "'");
    }
    if (used != t.size()) fail(section, key, "expected a number, got '" + text + "'");
    return v;
}

std::uint64_t to_uint(const std::string& section, const std::string& key, const std::string& text) {
    const auto t = trim(text);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
        fail(section, key, "expected a nonnegative integer, got '" + text + "'");
    }
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        fail(section, key, "integer out of range: '" + text + "'");
    }
}

bool to_bool(const std::string& section, const std::string& key, const std::string& text) {
    const auto t = lower(trim(text));
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    fail(section, key, "expected true/false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> numbers(const std::string& section, const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (ss >> tok) out.push_back(to_double(section, key, tok));
    return out;
}

/// Reads one section, rejecting keys not in `known` (unless `prefix` matches).
class Section {
public:
    Section(const pt::ptree& root, std::string name, std::set<std::string> known, std::string prefix = {})
        : name_(std::move(name)) {
        const auto child = root.get_child_optional(name_);
        if (!child) return;
        for (const auto& [key, node] : *child) {
            if (!known.contains(key) && (prefix.empty() || key.rfind(prefix, 0) != 0)) {
                fail(name_, key, "unknown key");
            }
            values_[key] = node.data();
        }
    }

    const std::map<std::string, std::string>& values() const { return values_; }
    const std::string& name() const { return name_; }

    template <class F>
    void with(const std::string& key, F&& f) const {
        if (const auto it = values_.find(key); it != values_.end()) f(it->second);
    }
    void real(const std::string& key, double& out) const {
        with(key, [&](const std::string& v) { out = to_double(name_, key, v); });
    }
    void positive(const std::string& key, double& out) const {
        with(key, [&](const std::string& v) {
            out = to_double(name_, key, v);
            if (!(std::isfinite(out) && out > 0.0)) fail(name_, key, "must be positive and finite");
        });
    }
    template <class U>
    void integer(const std::string& key, U& out) const {
        with(key, [&](const std::string& v) { out = static_cast<U>(to_uint(name_, key, v)); });
    }
    void sizes(const std::string& key, std::vector<std::size_t>& out) const {
        with(key, [&](const std::string& v) {
            out.clear();
            for (const auto& item : split(v, ',')) out.push_back(static_cast<std::size_t>(to_uint(name_, key, item)));
            if (out.empty()) fail(name_, key, "list must not be empty");
        });
    }
    void reals(const std::string& key, std::vector<double>& out) const {
        with(key, [&](const std::string& v) {
            out.clear();
            for (const auto& item : split(v, ',')) out.push_back(to_double(name_, key, item));
            if (out.empty()) fail(name_, key, "list must not be empty");
        });
    }

private:
    std::string name_;
    std::map<std::string, std::string> values_;
};

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& items) {
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) os << ", ";
        if constexpr (std::is_floating_point_v<T>) {
            os << fmt(items[i]);
        } else {
            os << items[i];
        }
    }
    return os.str();
}

}  // namespace

RadarParams RunConfig::radar_params() const {
    try {
        const ExtendedGrid g(grid);
        const RadarParams p = make_radar_params(radar, g.x(0));
        g.check_compatible(p);
        return p;
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("[radar]/[grid]: ") + ex.what());
    }
}

RunConfig parse_config(std::istream& in) {
    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& ex) {
        throw ConfigError("config line " + std::to_string(ex.line()) + ": " + ex.message());
    }
    static const std::set<std::string> sections{"radar",      "grid",     "scene",  "recovery",
                                                "experiment", "baseline", "output", "run"};
    for (const auto& [name, node] : root) {
        if (!sections.contains(name)) throw ConfigError("unknown section [" + name + "]");
        if (node.empty() && !node.data().empty()) throw ConfigError("key '" + name + "' outside any section");
    }

    RunConfig cfg;

    const Section radar(root, "radar",
                        {"platform_speed", "carrier_frequency", "wavelength", "pulse_width", "bandwidth",
                         "range_sample_rate", "prf", "range_samples", "azimuth_samples", "propagation_speed",
                         "range_window_start"});
    radar.positive("platform_speed", cfg.radar.platform_speed);
    radar.positive("carrier_frequency", cfg.radar.carrier_frequency);
    radar.positive("wavelength", cfg.radar.wavelength);
    radar.positive("pulse_width", cfg.radar.pulse_width);
    radar.positive("bandwidth", cfg.radar.bandwidth);
    radar.positive("range_sample_rate", cfg.radar.range_sample_rate);
    radar.positive("prf", cfg.radar.prf);
    radar.positive("propagation_speed", cfg.radar.propagation_speed);
    radar.integer("range_samples", cfg.radar.range_samples);
    radar.integer("azimuth_samples", cfg.radar.azimuth_samples);
    radar.with("range_window_start", [&](const std::string& v) {
        if (lower(trim(v)) == "auto") {
            cfg.radar.range_window_start = -1.0;
        } else {
            cfg.radar.range_window_start = to_double("radar", "range_window_start", v);
            if (!(cfg.radar.range_window_start >= 0.0) || std::isinf(cfg.radar.range_window_start)) {
                fail("radar", "range_window_start", "must be 'auto' or a nonnegative time");
            }
        }
    });

    const Section grid(root, "grid",
                       {"x_origin", "y_origin", "vx_origin", "vy_origin", "bin_x", "bin_y", "bin_vx", "bin_vy", "nx",
                        "ny", "nvx", "nvy"});
    grid.real("x_origin", cfg.grid.x_origin);
    grid.real("y_origin", cfg.grid.y_origin);
    grid.real("vx_origin", cfg.grid.vx_origin);
    grid.real("vy_origin", cfg.grid.vy_origin);
    grid.positive("bin_x", cfg.grid.bin_x);
    grid.positive("bin_y", cfg.grid.bin_y);
    grid.positive("bin_vx", cfg.grid.bin_vx);
    grid.positive("bin_vy", cfg.grid.bin_vy);
    grid.integer("nx", cfg.grid.nx);
    grid.integer("ny", cfg.grid.ny);
    grid.integer("nvx", cfg.grid.nvx);
    grid.integer("nvy", cfg.grid.nvy);
    for (const auto& [key, value] : grid.values()) {
        if ((key == "nx" || key == "ny" || key == "nvx" || key == "nvy") && to_uint("grid", key, value) == 0) {
            fail("grid", key, "must be at least 1");
        }
    }

    const Section scene(root, "scene", {"coordinates", "random_targets", "random_seed", "snr_db", "noise_seed"},
                        "target");
    bool local = true;
    scene.with("coordinates", [&](const std::string& v) {
        const auto t = lower(trim(v));
        if (t != "local" && t != "absolute") fail("scene", "coordinates", "expected 'local' or 'absolute'");
        local = t == "local";
    });
    scene.integer("random_targets", cfg.scene.random_targets);
    scene.integer("random_seed", cfg.scene.random_seed);
    scene.integer("noise_seed", cfg.scene.noise_seed);
    scene.real("snr_db", cfg.scene.snr_db);
    {
        std::vector<std::pair<std::uint64_t, Target>> targets;
        for (const auto& [key, value] : scene.values()) {
            if (key.rfind("target", 0) != 0) continue;
            const auto suffix = key.substr(6);
            const auto order = to_uint("scene", key, suffix.empty() ? std::string("0") : suffix);
            const auto v = numbers("scene", key, value);
            if (v.size() != 4 && v.size() != 6) fail("scene", key, "expected 'x y vx vy [re im]'");
            Target t;
            t.x0 = v[0] + (local ? cfg.grid.x_origin : 0.0);
            t.y0 = v[1] + (local ? cfg.grid.y_origin : 0.0);
            t.vx = v[2];
            t.vy = v[3];
            if (v.size() == 6) t.reflectivity = {v[4], v[5]};
            for (double x : v) {
                if (!std::isfinite(x)) fail("scene", key, "values must be finite");
            }
            targets.emplace_back(order, t);
        }
        std::stable_sort(targets.begin(), targets.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [order, t] : targets) cfg.scene.targets.push_back(t);
    }

    const Section recovery(root, "recovery",
                           {"sparsity", "max_sparsity", "measurements", "selection_seed", "max_iterations",
                            "stall_tolerance", "residual_threshold", "cache_policy"});
    recovery.with("sparsity", [&](const std::string& v) {
        cfg.recovery.sparsity =
            lower(trim(v)) == "auto" ? 0 : static_cast<std::size_t>(to_uint("recovery", "sparsity", v));
    });
    recovery.integer("max_sparsity", cfg.recovery.max_sparsity);
    recovery.integer("measurements", cfg.recovery.measurements);
    recovery.integer("selection_seed", cfg.recovery.selection_seed);
    recovery.integer("max_iterations", cfg.recovery.max_iterations);
    recovery.real("stall_tolerance", cfg.recovery.stall_tolerance);
    recovery.with("residual_threshold", [&](const std::string& v) {
        if (lower(trim(v)) == "auto") {
            cfg.recovery.residual_threshold.reset();
        } else {
            const double eps = to_double("recovery", "residual_threshold", v);
            if (!(eps >= 0.0) || std::isinf(eps)) fail("recovery", "residual_threshold", "must be 'auto' or >= 0");
            cfg.recovery.residual_threshold = eps;
        }
    });
    recovery.with("cache_policy", [&](const std::string& v) {
        const auto t = lower(trim(v));
        if (t == "none") {
            cfg.recovery.cache_policy = CachePolicy::none;
        } else if (t == "full_row_cache" || t == "full") {
            cfg.recovery.cache_policy = CachePolicy::full_row_cache;
        } else {
            fail("recovery", "cache_policy", "expected 'none' or 'full_row_cache'");
        }
    });
    if (cfg.recovery.measurements == 0) fail("recovery", "measurements", "must be at least 1");
    if (cfg.recovery.max_iterations == 0) fail("recovery", "max_iterations", "must be at least 1");
    if (cfg.recovery.max_sparsity == 0) fail("recovery", "max_sparsity", "must be at least 1");

    const Section experiment(root, "experiment",
                             {"mode", "target_counts", "measurement_counts", "snr_values_db", "trials_per_point",
                              "base_seed"});
    experiment.with("mode", [&](const std::string& v) {
        try {
            cfg.experiment.mode = parse_experiment_mode(lower(trim(v)));
        } catch (const std::invalid_argument& ex) {
            fail("experiment", "mode", ex.what());
        }
    });
    experiment.sizes("target_counts", cfg.experiment.target_counts);
    experiment.sizes("measurement_counts", cfg.experiment.measurement_counts);
    experiment.reals("snr_values_db", cfg.experiment.snr_values_db);
    experiment.integer("trials_per_point", cfg.experiment.trials_per_point);
    experiment.integer("base_seed", cfg.experiment.base_seed);
    if (cfg.experiment.trials_per_point == 0) fail("experiment", "trials_per_point", "must be at least 1");
    cfg.experiment.options.max_iterations = cfg.recovery.max_iterations;
    cfg.experiment.options.stall_tolerance = cfg.recovery.stall_tolerance;
    cfg.experiment.options.cache_policy = cfg.recovery.cache_policy;

    const Section baseline(root, "baseline", {"velocity_hypotheses"});
    baseline.with("velocity_hypotheses", [&](const std::string& v) {
        cfg.baseline.velocity_hypotheses.clear();
        for (const auto& item : split(v, ';')) {
            const auto pair = numbers("baseline", "velocity_hypotheses", item);
            if (pair.size() != 2) fail("baseline", "velocity_hypotheses", "expected 'vx vy; vx vy; ...'");
            cfg.baseline.velocity_hypotheses.emplace_back(pair[0], pair[1]);
        }
        if (cfg.baseline.velocity_hypotheses.empty()) fail("baseline", "velocity_hypotheses", "list must not be empty");
    });

    const Section output(root, "output", {"directory", "echo_csv"});
    output.with("directory", [&](const std::string& v) { cfg.output.directory = trim(v); });
    output.with("echo_csv", [&](const std::string& v) { cfg.output.echo_csv = to_bool("output", "echo_csv", v); });

    const Section run(root, "run", {"threads"});
    run.integer("threads", cfg.threads);

    try {
        (void)cfg.make_grid();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("[grid]: ") + ex.what());
    }
    (void)cfg.radar_params();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in);
}

void write_config(const RunConfig& c, std::ostream& out) {
    out << "[radar]\n"
        << "platform_speed = " << fmt(c.radar.platform_speed) << '\n'
        << "carrier_frequency = " << fmt(c.radar.carrier_frequency) << '\n'
        << "wavelength = " << fmt(c.radar.wavelength) << '\n'
        << "pulse_width = " << fmt(c.radar.pulse_width) << '\n'
        << "bandwidth = " << fmt(c.radar.bandwidth) << '\n'
        << "range_sample_rate = " << fmt(c.radar.range_sample_rate) << '\n'
        << "prf = " << fmt(c.radar.prf) << '\n'
        << "range_samples = " << c.radar.range_samples << '\n'
        << "azimuth_samples = " << c.radar.azimuth_samples << '\n'
        << "propagation_speed = " << fmt(c.radar.propagation_speed) << '\n'
        << "range_window_start = "
        << (c.radar.range_window_start < 0.0 ? std::string("auto") : fmt(c.radar.range_window_start)) << "\n\n";

    out << "[grid]\n"
        << "x_origin = " << fmt(c.grid.x_origin) << '\n'
        << "y_origin = " << fmt(c.grid.y_origin) << '\n'
        << "vx_origin = " << fmt(c.grid.vx_origin) << '\n'
        << "vy_origin = " << fmt(c.grid.vy_origin) << '\n'
        << "bin_x = " << fmt(c.grid.bin_x) << '\n'
        << "bin_y = " << fmt(c.grid.bin_y) << '\n'
        << "bin_vx = " << fmt(c.grid.bin_vx) << '\n'
        << "bin_vy = " << fmt(c.grid.bin_vy) << '\n'
        << "nx = " << c.grid.nx << '\n'
        << "ny = " << c.grid.ny << '\n'
        << "nvx = " << c.grid.nvx << '\n'
        << "nvy = " << c.grid.nvy << "\n\n";

    out << "[scene]\n"
        << "coordinates = absolute\n"
        << "random_targets = " << c.scene.random_targets << '\n'
        << "random_seed = " << c.scene.random_seed << '\n'
        << "snr_db = " << fmt(c.scene.snr_db) << '\n'
        << "noise_seed = " << c.scene.noise_seed << '\n';
    for (std::size_t i = 0; i < c.scene.targets.size(); ++i) {
        const auto& t = c.scene.targets[i];
        out << "target" << (i + 1) << " = " << fmt(t.x0) << ' ' << fmt(t.y0) << ' ' << fmt(t.vx) << ' ' << fmt(t.vy)
            << ' ' << fmt(t.reflectivity.real()) << ' ' << fmt(t.reflectivity.imag()) << '\n';
    }
    out << '\n';

    out << "[recovery]\n"
        << "sparsity = " << (c.recovery.sparsity == 0 ? std::string("auto") : std::to_string(c.recovery.sparsity))
        << '\n'
        << "max_sparsity = " << c.recovery.max_sparsity << '\n'
        << "measurements = " << c.recovery.measurements << '\n'
        << "selection_seed = " << c.recovery.selection_seed << '\n'
        << "max_iterations = " << c.recovery.max_iterations << '\n'
        << "stall_tolerance = " << fmt(c.recovery.stall_tolerance) << '\n'
        << "residual_threshold = "
        << (c.recovery.residual_threshold ? fmt(*c.recovery.residual_threshold) : std::string("auto")) << '\n'
        << "cache_policy = " << (c.recovery.cache_policy == CachePolicy::none ? "none" : "full_row_cache") << "\n\n";

    out << "[experiment]\n"
        << "mode = " << to_string(c.experiment.mode) << '\n'
        << "target_counts = " << join(c.experiment.target_counts) << '\n'
        << "measurement_counts = " << join(c.experiment.measurement_counts) << '\n'
        << "snr_values_db = " << join(c.experiment.snr_values_db) << '\n'
        << "trials_per_point = " << c.experiment.trials_per_point << '\n'
        << "base_seed = " << c.experiment.base_seed << "\n\n";

    out << "[baseline]\nvelocity_hypotheses = ";
    for (std::size_t i = 0; i < c.baseline.velocity_hypotheses.size(); ++i) {
        if (i) out << "; ";
        out << fmt(c.baseline.velocity_hypotheses[i].first) << ' ' << fmt(c.baseline.velocity_hypotheses[i].second);
    }
    out << "\n\n";

    out << "[output]\n"
        << "directory = " << c.output.directory.string() << '\n'
        << "echo_csv = " << (c.output.echo_csv ? "true" : "false") << "\n\n";

    out << "[run]\nthreads = " << c.threads << '\n';
}

}  // namespace sarcs
