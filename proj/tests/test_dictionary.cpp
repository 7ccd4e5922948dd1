#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sarcs/dictionary.hpp"
#include "sarcs/echo_sim.hpp"
#include "sarcs/experiments.hpp"
#include "test_support.hpp"

using namespace sarcs;
using sarcs::oracle::norm2;
using sarcs::oracle::reference_sample;
using sarcs::oracle::short_aperture;
using sarcs::oracle::small_grid;

namespace {

cdouble dot(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    cdouble s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

std::vector<cdouble> random_vector(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> d;
    std::vector<cdouble> v(n);
    for (auto& z : v) z = {d(gen), d(gen)};
    return v;
}

}  // namespace

TEST(Atom, MatchesReferenceModel) {
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{GridSpec{}};
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::size_t> flat(0, g.size() - 1), m(0, p.range_samples - 1),
        n(0, p.azimuth_samples - 1);
    std::size_t nonzero = 0;
    for (int i = 0; i < 20000; ++i) {
        const auto c = g.unflatten(flat(gen));
        const auto mm = m(gen), nn = n(gen);
        const auto pt = g.to_physical(c);
        bool edge = false;
        const auto ref = reference_sample(p, pt.x, pt.y, pt.vx, pt.vy, mm, nn, &edge, 1e-12);
        if (edge) continue;
        const auto got = atom_sample(p, g, c, mm, nn);
        ASSERT_LT(std::abs(got - ref), 1e-8) << "flat " << g.flat_index(c) << " m " << mm << " n " << nn;
        nonzero += got != cdouble{};
    }
    EXPECT_GT(nonzero, 15000u);
    EXPECT_THROW((void)atom_sample(p, g, {0, 0, 0, 0}, 1213, 0), std::out_of_range);
}

TEST(Atom, EqualsPointEchoOfGridTarget) {
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{GridSpec{}};
    for (const GridCoord c : {GridCoord{0, 0, 0, 0}, GridCoord{8, 5, 10, 5}, GridCoord{30, 30, 10, 10}}) {
        const auto echo = point_echo(target_at(g, c), p);
        double worst = 0.0;
        for (std::size_t n = 0; n < p.azimuth_samples; ++n)
            for (std::size_t m = 0; m < p.range_samples; ++m)
                worst = std::max(worst, std::abs(atom_sample(p, g, c, m, n) - echo.at(m, n)));
        EXPECT_LE(worst, 1e-12);
    }
}

TEST(Operator, ColumnsAreRestrictedAtoms) {
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{GridSpec{}};
    const auto sel = select_measurements(40, p.total_samples(), 11);
    const SensingOperator cached(p, g, sel, CachePolicy::full_row_cache);
    const SensingOperator lazy(p, g, sel, CachePolicy::none);
    EXPECT_EQ(cached.rows(), 40u);
    EXPECT_EQ(cached.cols(), 116281u);
    for (std::size_t flat : {std::size_t{0}, std::size_t{12345}, std::size_t{116280}}) {
        const auto col = cached.column(flat);
        const auto c = g.unflatten(flat);
        for (std::size_t i = 0; i < col.size(); ++i) {
            const auto gamma = sel.indices[i];
            EXPECT_LE(std::abs(col[i] - atom_sample(p, g, c, gamma % p.range_samples, gamma / p.range_samples)),
                      1e-12);
            EXPECT_LE(std::abs(col[i] - lazy.entry(i, flat)), 1e-12);
        }
        std::vector<cdouble> onehot(g.size());
        onehot[flat] = 1.0;
        const auto y = cached.forward(onehot);
        for (std::size_t i = 0; i < y.size(); ++i) EXPECT_LE(std::abs(y[i] - col[i]), 1e-12);
    }
    for (std::size_t flat = 0; flat < g.size(); flat += 1013) {
        EXPECT_NEAR(cached.column_norms()[flat], norm2(cached.column(flat)), 1e-12);
        EXPECT_NEAR(lazy.column_norms()[flat], cached.column_norms()[flat], 1e-12);
    }
}

TEST(Operator, ZeroInputs) {
    const auto p = short_aperture(41);
    const ExtendedGrid g{small_grid(4, 4, 2, 2)};
    const SensingOperator op(p, g, select_measurements(8, p.total_samples(), 1));
    for (const auto& v : op.forward(std::vector<cdouble>(g.size()))) EXPECT_EQ(v, cdouble{});
    for (const auto& v : op.adjoint(std::vector<cdouble>(8))) EXPECT_EQ(v, cdouble{});
}

TEST(Operator, AdjointIdentityOnRandomSmallGrids) {
    std::mt19937_64 gen(2024);
    const auto p = short_aperture(61);
    const std::size_t shapes[][4] = {{4, 4, 2, 2}, {3, 5, 1, 3}, {6, 2, 3, 1}, {5, 5, 3, 3}};
    for (const auto& s : shapes) {
        const ExtendedGrid g{small_grid(s[0], s[1], s[2], s[3])};
        for (auto policy : {CachePolicy::full_row_cache, CachePolicy::none}) {
            for (std::size_t rep = 0; rep < 3; ++rep) {
                const SensingOperator op(p, g, select_measurements(8, p.total_samples(), gen()), policy);
                const auto x = random_vector(g.size(), gen);
                const auto y = random_vector(op.rows(), gen);
                const auto lhs = dot(op.forward(x), y);   // <Phi x, y>
                const auto rhs = dot(x, op.adjoint(y));   // <x, Phi^H y>
                EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs)));
            }
        }
    }
}

TEST(Operator, GramDiagonal) {
    const auto p = short_aperture(61);
    const ExtendedGrid g{small_grid(5, 5, 3, 3)};
    const SensingOperator op(p, g, select_measurements(20, p.total_samples(), 5));
    for (std::size_t flat = 0; flat < g.size(); flat += 7) {
        const auto back = op.adjoint(op.column(flat));
        const double nrm = op.column_norms()[flat];
        EXPECT_NEAR(back[flat].real(), nrm * nrm, 1e-10 * nrm * nrm);
        EXPECT_NEAR(back[flat].imag(), 0.0, 1e-10 * nrm * nrm);
    }
}

TEST(Operator, SparseForwardMatchesDense) {
    const auto p = short_aperture(61);
    const ExtendedGrid g{small_grid(5, 5, 3, 3)};
    const SensingOperator op(p, g, select_measurements(16, p.total_samples(), 9), CachePolicy::none);
    std::vector<SparseEntry> sparse{{3, {1.0, 0.5}}, {77, {-0.2, 0.0}}, {200, {0.0, 2.0}}};
    std::vector<cdouble> dense(g.size());
    for (const auto& e : sparse) dense[e.index] = e.value;
    const auto a = op.forward(sparse);
    const auto b = op.forward(dense);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(std::abs(a[i] - b[i]), 1e-12);
    sparse.push_back({g.size(), 1.0});
    EXPECT_THROW(op.forward(sparse), std::out_of_range);
}

TEST(Operator, ForwardOfTruthEqualsRestrictedSceneEcho) {
    const auto p = default_radar_params(29992.5);
    const ExtendedGrid g{GridSpec{}};
    const auto scene = three_target_scene(g);
    const auto echo = scene_echo(scene.scene, p);
    const SensingOperator op(p, g, select_measurements(100, p.total_samples(), 7));
    const auto y = op.restrict(echo);
    const auto dense = op.forward(scene.truth.dense());
    const auto sparse = op.forward(scene.truth.sparse());
    double diff_dense = 0.0, diff_sparse = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        diff_dense += std::norm(dense[i] - y[i]);
        diff_sparse += std::norm(sparse[i] - y[i]);
        ref += std::norm(y[i]);
    }
    EXPECT_GT(ref, 0.0);
    EXPECT_LE(std::sqrt(diff_dense / ref), 1e-12);
    EXPECT_LE(std::sqrt(diff_sparse / ref), 1e-12);
}

TEST(Operator, NormsCountSupportSamples) {
    // Every sample selected: a static atom sees 1200 samples in each of 41
    // pulses.  The window opens 0.05 m early so no echo edge lands on a sample.
    const auto p = short_aperture(41, 29992.45);
    GridSpec gs = small_grid(2, 1, 1, 1);
    gs.bin_x = 2.0;
    gs.vx_origin = 0.0;
    gs.vy_origin = 0.0;
    const ExtendedGrid g{gs};
    const SensingOperator all(p, g, select_measurements(p.total_samples(), p.total_samples(), 0));
    EXPECT_NEAR(all.column_norms()[0], std::sqrt(1200.0 * 41.0), 1e-9);
    EXPECT_NEAR(all.column_norms()[1], std::sqrt(1200.0 * 41.0), 1e-9);

    // Sample 1201 lies past the nearest atom's echo (samples 1..1200) but
    // inside the next one, 1.6 samples later (2..1201).
    MeasurementSelection late;
    for (std::size_t n = 0; n < p.azimuth_samples; ++n) late.indices.push_back(1201 + p.range_samples * n);
    const SensingOperator tail(p, g, late);
    EXPECT_EQ(tail.column_norms()[0], 0.0);
    EXPECT_NEAR(tail.column_norms()[1], std::sqrt(41.0), 1e-9);
}

TEST(Operator, RejectsBadSelections) {
    const auto p = short_aperture(11);
    const ExtendedGrid g{small_grid(2, 2, 1, 1)};
    EXPECT_THROW(SensingOperator(p, g, MeasurementSelection{}), std::invalid_argument);
    EXPECT_THROW(SensingOperator(p, g, MeasurementSelection{{5, 5}, 0}), std::invalid_argument);
    EXPECT_THROW(SensingOperator(p, g, MeasurementSelection{{p.total_samples()}, 0}), std::invalid_argument);
    const SensingOperator op(p, g, select_measurements(4, p.total_samples(), 1));
    EXPECT_THROW(op.restrict(EchoMatrix(short_aperture(13))), std::invalid_argument);
}

TEST(Operator, CacheRoundTrip) {
    const auto p = short_aperture(41);
    const ExtendedGrid g{small_grid(4, 4, 2, 2)};
    const SensingOperator op(p, g, select_measurements(12, p.total_samples(), 21));
    const auto path = std::filesystem::temp_directory_path() / "sarcs_cache_roundtrip.bin";
    op.save_cache(path);
    const auto back = SensingOperator::load_cache(path, p, g);
    EXPECT_EQ(back.selection().indices, op.selection().indices);
    EXPECT_EQ(back.selection().seed, 21u);
    for (std::size_t i = 0; i < op.rows(); ++i)
        for (std::size_t f = 0; f < op.cols(); ++f) ASSERT_EQ(back.entry(i, f), op.entry(i, f));
    EXPECT_THROW(SensingOperator::load_cache(path, p, ExtendedGrid{small_grid(4, 4, 2, 1)}), std::runtime_error);
    std::filesystem::remove(path);

    const SensingOperator lazy(p, g, select_measurements(12, p.total_samples(), 21), CachePolicy::none);
    EXPECT_THROW(lazy.save_cache(path), std::logic_error);
}
