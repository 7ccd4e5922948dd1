#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sarcs/radar_model.hpp"

using namespace sarcs;

TEST(RadarParams, DefaultSystem) {
    const auto p = default_radar_params(29992.5);
    EXPECT_EQ(p.range_samples, 1213u);
    EXPECT_EQ(p.azimuth_samples, 595u);
    EXPECT_EQ(p.total_samples(), 721735u);
    EXPECT_DOUBLE_EQ(p.chirp_rate, 1e13);
    EXPECT_EQ(p.pulse_samples(), 1200u);
    EXPECT_DOUBLE_EQ(p.range_window_start, 2.0 * 29992.5 / kSpeedOfLight);
    EXPECT_NEAR(p.aperture_time(), 595.0 / 300.0, 1e-15);
}

TEST(RadarParams, TimeAxes) {
    const auto p = default_radar_params(30000.0);
    EXPECT_DOUBLE_EQ(p.azimuth_time(297), 0.0);
    EXPECT_DOUBLE_EQ(p.azimuth_time(0), -297.0 / 300.0);
    EXPECT_DOUBLE_EQ(p.azimuth_time(594), 297.0 / 300.0);
    EXPECT_DOUBLE_EQ(p.range_time(0), p.range_window_start);
    EXPECT_DOUBLE_EQ(p.range_time(120), p.range_window_start + 1e-6);
}

TEST(RadarParams, RejectsInconsistentSpecs) {
    RadarSpec s;
    s.wavelength = 0.05;
    EXPECT_THROW(make_radar_params(s, 30000.0), std::invalid_argument);
    s = RadarSpec{};
    s.prf = 0.0;
    EXPECT_THROW(make_radar_params(s, 30000.0), std::invalid_argument);
    s = RadarSpec{};
    s.range_samples = 1199;
    EXPECT_THROW(make_radar_params(s, 30000.0), std::invalid_argument);
    s = RadarSpec{};
    EXPECT_THROW(make_radar_params(s, -1.0), std::invalid_argument);
    s.range_window_start = 1e-4;  // explicit window needs no nearest range
    EXPECT_NO_THROW(make_radar_params(s, -1.0));
}

TEST(Target, ZeroDopplerTime) {
    const Target t{30000.0, 5.0, 0.0, 50.0};
    EXPECT_DOUBLE_EQ(t.zero_doppler_time(250.0), 5.0 / 200.0);
    const Target bad{30000.0, 5.0, 0.0, 250.0};
    EXPECT_THROW((void)bad.zero_doppler_time(250.0), std::invalid_argument);
    EXPECT_THROW(validate_target(bad, default_radar_params(30000.0)), std::invalid_argument);
}

TEST(ExtendedGrid, FlatIndexExamples) {
    const ExtendedGrid g{GridSpec{}};
    EXPECT_EQ(g.size(), 116281u);
    EXPECT_EQ(flat_index({0, 0, 0, 0}, g), 0u);
    EXPECT_EQ(flat_index({1, 0, 0, 0}, g), 1u);
    EXPECT_EQ(flat_index({0, 1, 0, 0}, g), 31u);
    EXPECT_EQ(flat_index({0, 0, 1, 0}, g), 961u);
    EXPECT_EQ(flat_index({0, 0, 0, 1}, g), 10571u);
    EXPECT_EQ(flat_index({30, 30, 10, 10}, g), 116280u);
    EXPECT_THROW((void)flat_index({31, 0, 0, 0}, g), std::out_of_range);
    EXPECT_THROW((void)g.unflatten(116281), std::out_of_range);
}

TEST(ExtendedGrid, FlatIndexBijectiveOnFullGrid) {
    const ExtendedGrid g{GridSpec{}};
    std::vector<bool> seen(g.size(), false);
    for (std::size_t q = 0; q < g.nvy(); ++q)
        for (std::size_t p = 0; p < g.nvx(); ++p)
            for (std::size_t n2 = 0; n2 < g.ny(); ++n2)
                for (std::size_t n1 = 0; n1 < g.nx(); ++n1) {
                    const GridCoord c{n1, n2, p, q};
                    const auto f = g.flat_index(c);
                    ASSERT_LT(f, g.size());
                    ASSERT_FALSE(seen[f]);
                    seen[f] = true;
                    ASSERT_EQ(g.unflatten(f), c);
                }
}

TEST(ExtendedGrid, PhysicalCoordinates) {
    const ExtendedGrid g{GridSpec{}};
    auto check = [&](GridCoord c, double x, double y, double vx, double vy) {
        const auto pt = grid_to_physical(c, g);
        EXPECT_DOUBLE_EQ(pt.x, x);
        EXPECT_DOUBLE_EQ(pt.y, y);
        EXPECT_DOUBLE_EQ(pt.vx, vx);
        EXPECT_DOUBLE_EQ(pt.vy, vy);
    };
    check({0, 0, 0, 0}, 29992.5, 0.0, -10.0, -10.0);
    check({8, 5, 10, 5}, 29996.5, 2.5, 10.0, 0.0);
    check({23, 16, 7, 7}, 30004.0, 8.0, 4.0, 4.0);
    EXPECT_THROW((void)grid_to_physical({0, 0, 11, 0}, g), std::out_of_range);
}

TEST(ExtendedGrid, SnapRoundTrip) {
    const ExtendedGrid g{GridSpec{}};
    for (std::size_t f = 0; f < g.size(); f += 97) {
        const auto c = g.unflatten(f);
        GridCoord back;
        ASSERT_TRUE(g.snap(g.to_physical(c), back));
        EXPECT_EQ(back, c);
    }
    GridCoord c;
    EXPECT_FALSE(g.snap({29992.75, 0.0, 0.0, 0.0}, c));  // between range bins
    EXPECT_FALSE(g.snap({29992.5, 0.0, 12.0, 0.0}, c));  // beyond the velocity span
    EXPECT_FALSE(g.snap({29992.0, 0.0, 0.0, 0.0}, c));   // before the origin
}

TEST(ExtendedGrid, Compatibility) {
    const ExtendedGrid g{GridSpec{}};
    EXPECT_NO_THROW(g.check_compatible(default_radar_params(29992.5)));
    // window opened 10 m too late
    EXPECT_THROW(g.check_compatible(default_radar_params(30002.5)), std::invalid_argument);
    GridSpec fast;
    fast.vy_origin = 240.0;
    fast.nvy = 11;  // 240 .. 260 contains the platform speed
    EXPECT_THROW(ExtendedGrid(fast).check_compatible(default_radar_params(29992.5)), std::invalid_argument);
    GridSpec bad;
    bad.bin_x = 0.0;
    EXPECT_THROW(ExtendedGrid{bad}, std::invalid_argument);
}

TEST(ExtendedGrid, TargetAt) {
    const ExtendedGrid g{GridSpec{}};
    const auto t = target_at(g, {23, 16, 7, 7}, {0.5, -0.5});
    EXPECT_DOUBLE_EQ(t.x0, 30004.0);
    EXPECT_DOUBLE_EQ(t.y0, 8.0);
    EXPECT_DOUBLE_EQ(t.vx, 4.0);
    EXPECT_DOUBLE_EQ(t.vy, 4.0);
    EXPECT_EQ(t.reflectivity, cdouble(0.5, -0.5));
}
