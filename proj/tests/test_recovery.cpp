#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sarcs/echo_sim.hpp"
#include "sarcs/experiments.hpp"
#include "sarcs/recovery.hpp"
#include "test_support.hpp"

using namespace sarcs;
using sarcs::oracle::reference_sample;
using sarcs::oracle::short_aperture;
using sarcs::oracle::small_grid;

TEST(SparseProfile, Basics) {
    const ExtendedGrid g{small_grid(4, 4, 2, 2)};
    SparseProfile p(g);
    p.add({3, 1, 1, 0}, {2.0, 0.0});
    p.add({0, 0, 0, 0}, {0.0, 1.0});
    EXPECT_THROW(p.add({3, 1, 1, 0}, 1.0), std::invalid_argument);
    EXPECT_THROW(p.add({4, 0, 0, 0}, 1.0), std::out_of_range);
    const auto s = p.sparse();
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].index, 0u);
    EXPECT_EQ(s[1].index, 3u + 4u * (1u + 4u * 1u));
    const auto d = p.dense();
    EXPECT_EQ(d.size(), g.size());
    EXPECT_EQ(d[s[1].index], cdouble(2.0, 0.0));
    const auto scene = p.to_scene();
    ASSERT_EQ(scene.targets.size(), 2u);
    EXPECT_DOUBLE_EQ(scene.targets[0].x0, g.x(3));
    EXPECT_DOUBLE_EQ(scene.targets[0].vx, g.vx(1));
}

TEST(RelativeError, Examples) {
    const ExtendedGrid g{small_grid(4, 4, 2, 2)};
    SparseProfile truth(g), zero(g), close(g), other_grid(ExtendedGrid{small_grid(4, 4, 2, 1)});
    truth.add({1, 2, 0, 1}, 1.0);
    close.add({1, 2, 0, 1}, 0.95);
    EXPECT_DOUBLE_EQ(relative_error(truth, truth), 0.0);
    EXPECT_DOUBLE_EQ(relative_error(zero, truth), 1.0);
    EXPECT_NEAR(relative_error(close, truth), 0.05, 1e-15);
    EXPECT_THROW(relative_error(truth, zero), std::invalid_argument);
    other_grid.add({1, 2, 0, 0}, 1.0);
    EXPECT_THROW(relative_error(other_grid, truth), std::invalid_argument);
}

TEST(Cosamp, SingleAtomCertificate) {
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{GridSpec{}};
    const SensingOperator op(p, g, select_measurements(30, p.total_samples(), 4));
    const std::size_t flat = g.flat_index({12, 20, 3, 8});
    const auto y = op.column(flat);
    RecoveryConfig cfg;
    cfg.sparsity = 1;
    cfg.residual_threshold = noiseless_threshold(y);
    const auto r = cosamp(op, y, cfg);
    ASSERT_EQ(r.profile.size(), 1u);
    EXPECT_EQ(r.profile.sparse()[0].index, flat);
    EXPECT_LE(std::abs(r.profile.sparse()[0].value - 1.0), 1e-8);
    EXPECT_EQ(r.diagnostics.iterations.size(), 1u);
    EXPECT_EQ(r.diagnostics.halt, HaltReason::residual_below_threshold);
}

TEST(Cosamp, ThreeTargetScene) {
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{GridSpec{}};
    const auto scene = three_target_scene(g);
    ASSERT_EQ(scene.truth.sparse().size(), 3u);
    EXPECT_EQ(scene.truth.entries()[0].coord, (GridCoord{8, 5, 5, 5}));
    EXPECT_EQ(scene.truth.entries()[1].coord, (GridCoord{15, 20, 10, 5}));
    EXPECT_EQ(scene.truth.entries()[2].coord, (GridCoord{23, 16, 7, 7}));

    const auto echo = scene_echo(scene.scene, p);
    const SensingOperator op(p, g, select_measurements(100, p.total_samples(), 7));
    const auto y = op.restrict(echo);
    RecoveryConfig cfg;
    cfg.sparsity = 3;
    cfg.residual_threshold = noiseless_threshold(y);
    const auto r = cosamp(op, y, cfg);
    ASSERT_EQ(r.profile.size(), 3u);
    const auto got = r.profile.sparse();
    const auto want = scene.truth.sparse();
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(got[i].index, want[i].index);
        EXPECT_LE(std::abs(got[i].value - 1.0), 1e-3);
    }
    EXPECT_LT(relative_error(r.profile, scene.truth), 0.1);

    const auto again = cosamp(op, y, cfg);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(again.profile.sparse()[i].value, got[i].value);

    const auto automatic = cosamp_auto(op, y, cfg, 8);
    EXPECT_EQ(automatic.profile.size(), 3u);
}

TEST(Cosamp, MatchesExhaustiveSingleAtomOracle) {
    // Brute force: the best single atom maximizes |<a_g, y>|^2 / ||a_g||^2.
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{small_grid(6, 6, 3, 3)};
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    std::normal_distribution<double> normal;
    int agree = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto sel = select_measurements(12, p.total_samples(), gen());
        const SensingOperator op(p, g, sel);
        const auto truth = g.unflatten(pick(gen));
        const cdouble refl{normal(gen), normal(gen)};
        const auto echo = point_echo(target_at(g, truth, refl), p);
        const auto y = op.restrict(echo);

        std::size_t oracle = 0;
        double best = -1.0;
        for (std::size_t f = 0; f < g.size(); ++f) {
            const auto pt = g.to_physical(g.unflatten(f));
            cdouble corr{};
            double energy = 0.0;
            for (std::size_t i = 0; i < sel.size(); ++i) {
                const auto gamma = sel.indices[i];
                const auto a = reference_sample(p, pt.x, pt.y, pt.vx, pt.vy, gamma % p.range_samples,
                                                gamma / p.range_samples);
                corr += std::conj(a) * y[i];
                energy += std::norm(a);
            }
            const double explained = energy > 0.0 ? std::norm(corr) / energy : 0.0;
            if (explained > best) {
                best = explained;
                oracle = f;
            }
        }
        RecoveryConfig cfg;
        cfg.sparsity = 1;
        cfg.residual_threshold = noiseless_threshold(y);
        const auto r = cosamp(op, y, cfg);
        agree += r.profile.size() == 1 && r.profile.sparse()[0].index == oracle;
    }
    EXPECT_GE(agree, 49);
}

TEST(Cosamp, NoisyStopsAtNoiseLevel) {
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{GridSpec{}};
    const auto scene = random_scene(2, g, 5);
    const auto clean = scene_echo(scene.scene, p);
    const double snr = 20.0;
    const auto noisy = add_noise(clean, snr, 6);
    const SensingOperator op(p, g, select_measurements(80, p.total_samples(), 8));
    const auto y = op.restrict(noisy);
    RecoveryConfig cfg;
    cfg.sparsity = 2;
    cfg.residual_threshold = std::sqrt(80.0 * noise_variance_for_snr(clean, snr));
    const auto r = cosamp(op, y, cfg);
    EXPECT_LT(relative_error(r.profile, scene.truth), 0.1);
    EXPECT_LE(r.diagnostics.final_residual_norm, 1.5 * cfg.residual_threshold);
}

TEST(Cosamp, InvalidInputs) {
    const auto p = short_aperture(41);
    const ExtendedGrid g{small_grid(3, 3, 1, 1)};
    const SensingOperator op(p, g, select_measurements(10, p.total_samples(), 1));
    std::vector<cdouble> y(10, 1.0);
    RecoveryConfig cfg;
    cfg.sparsity = 0;
    EXPECT_THROW(cosamp(op, y, cfg), std::invalid_argument);
    cfg.sparsity = 10;  // only 9 columns
    EXPECT_THROW(cosamp(op, y, cfg), std::invalid_argument);
    cfg.sparsity = 1;
    EXPECT_THROW(cosamp(op, std::vector<cdouble>(9), cfg), std::invalid_argument);
    cfg.residual_threshold = -1.0;
    EXPECT_THROW(cosamp(op, y, cfg), std::invalid_argument);

    cfg.residual_threshold = 0.0;
    const auto zero = cosamp(op, std::vector<cdouble>(10), cfg);
    EXPECT_TRUE(zero.profile.empty());
    EXPECT_EQ(zero.diagnostics.halt, HaltReason::residual_below_threshold);
}

TEST(ProfileCsv, RoundTripAndLayout) {
    const ExtendedGrid g{GridSpec{}};
    SparseProfile p(g);
    p.add({23, 16, 7, 7}, {0.25, -1.5});
    p.add({8, 5, 10, 5}, {1.0, 0.0});

    std::ostringstream truth;
    write_truth_csv(p, truth);
    std::istringstream lines(truth.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(header, "flat_index,n1,n2,p,q,re,im");
    EXPECT_EQ(first.substr(0, first.find(',')), std::to_string(g.flat_index({8, 5, 10, 5})));

    std::stringstream full;
    write_profile_csv(p, full);
    EXPECT_NE(full.str().find("29996.5"), std::string::npos);
    const auto back = read_profile_csv(full, g);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(relative_error(back, p), 0.0);

    std::istringstream from_truth(truth.str());
    EXPECT_EQ(relative_error(read_profile_csv(from_truth, g), p), 0.0);

    std::istringstream broken("flat_index,n1\n1,2\n");
    EXPECT_THROW(read_profile_csv(broken, g), std::runtime_error);
}

TEST(DiagnosticsCsv, Footer) {
    RecoveryDiagnostics d;
    d.iterations.push_back({1, 0.5, {1, 2}});
    d.halt = HaltReason::stalled;
    std::ostringstream out;
    write_diagnostics_csv(d, out);
    EXPECT_NE(out.str().find("iteration,residual_norm,support_size"), std::string::npos);
    EXPECT_NE(out.str().find("# halt_reason=stalled"), std::string::npos);
}
