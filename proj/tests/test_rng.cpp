#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "sarcs/dictionary.hpp"
#include "sarcs/rng.hpp"

using namespace sarcs;

TEST(SplitMix64, ReferenceSequence) {
    // Published SplitMix64 outputs for seed 0.
    SplitMix64 rng(0);
    EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

TEST(SplitMix64, BoundedIsInRangeAndRoughlyUniform) {
    SplitMix64 rng(42);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        ++counts[v];
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(SplitMix64, ComplexNormalVariance) {
    SplitMix64 rng(7);
    double power = 0.0, mean_re = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.complex_normal(2.0);
        power += std::norm(z);
        mean_re += z.real();
    }
    EXPECT_NEAR(power / n, 2.0, 0.03);
    EXPECT_NEAR(mean_re / n, 0.0, 0.01);
}

TEST(DeriveSeed, SensitiveToEveryWordAndOrder) {
    const auto base = derive_seed({1, 2, 3});
    EXPECT_EQ(base, derive_seed({1, 2, 3}));
    EXPECT_NE(base, derive_seed({1, 2, 4}));
    EXPECT_NE(base, derive_seed({3, 2, 1}));
    EXPECT_NE(base, derive_seed({1, 2}));
}

TEST(Selection, IdentityAndSingle) {
    const auto all = select_measurements(50, 50, 9);
    ASSERT_EQ(all.size(), 50u);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(all.indices[i], i);
    const auto one = select_measurements(1, 721735, 9);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_LT(one.indices[0], 721735u);
    EXPECT_THROW(select_measurements(0, 10, 1), std::invalid_argument);
    EXPECT_THROW(select_measurements(11, 10, 1), std::invalid_argument);
}

TEST(Selection, SortedDistinctDeterministic) {
    const auto a = select_measurements(100, 721735, 2010);
    const auto b = select_measurements(100, 721735, 2010);
    EXPECT_EQ(a.indices, b.indices);
    EXPECT_EQ(a.seed, 2010u);
    EXPECT_TRUE(std::is_sorted(a.indices.begin(), a.indices.end()));
    EXPECT_EQ(std::set<std::size_t>(a.indices.begin(), a.indices.end()).size(), 100u);
    EXPECT_NE(a.indices, select_measurements(100, 721735, 2011).indices);
}

TEST(Selection, UniformOverPositions) {
    // Every index of a 20-element population should be drawn about equally
    // often when picking 5 of them.
    std::vector<int> hits(20, 0);
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
        for (auto i : select_measurements(5, 20, seed).indices) ++hits[i];
    }
    for (int h : hits) EXPECT_NEAR(h, 5000, 300);
}
