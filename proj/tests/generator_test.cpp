#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "r1c/analysis.hpp"
#include "r1c/generator.hpp"

using namespace r1c;

TEST(SplitMix, ReferenceValue) {
    // first output of the reference generator started from state 0
    EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, DeterministicPerSeedAndStream) {
    Rng a(42, Stream::Noise), b(42, Stream::Noise), c(42, Stream::Factors), d(43, Stream::Noise);
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_NE(x, c.uniform());
    EXPECT_NE(x, d.uniform());
}

TEST(Rng, RangesAndPermutations) {
    Rng r(7, Stream::Permutations);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(r.below(13), 13u);
    }
    auto p = r.permutation(50);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(p[i], i);
    EXPECT_THROW(r.below(0), std::invalid_argument);
}

TEST(Rng, NormalMomentsAndUniformMean) {
    Rng r(11, Stream::Factors);
    const int n = 200000;
    double s = 0, s2 = 0, us = 0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
        us += r.uniform();
    }
    // five standard errors
    EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(us / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(ObservationSet, SortedUniqueValidAndSized) {
    const Dims dims{5, 4, 6};
    const auto omega = random_observation_set(dims, 9);
    EXPECT_TRUE(std::is_sorted(omega.begin(), omega.end()));
    EXPECT_EQ(std::set<MultiIndex>(omega.begin(), omega.end()).size(), omega.size());
    for (const auto& idx : omega) EXPECT_TRUE(idx.valid_for(dims));
    // every level adds at most 2 max(M, N) - 1 indices
    EXPECT_LE(omega.size(), 2 * std::max<std::size_t>(9, 6) - 1);
    EXPECT_GE(omega.size(), 6u);
}

TEST(ObservationSet, Deterministic) {
    EXPECT_EQ(random_observation_set({4, 5, 3}, 5), random_observation_set({4, 5, 3}, 5));
    EXPECT_NE(random_observation_set({4, 5, 3}, 5), random_observation_set({4, 5, 3}, 6));
}

TEST(ObservationSet, ModFullAndConnectedAtTheTopLevel) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Dims dims{2 + seed % 5, 3 + seed % 4, 2 + seed % 3, 4};
        const auto inst = make_instance({dims, seed, 0.0});
        for (std::size_t t = 1; t <= dims.size(); ++t) EXPECT_TRUE(is_mod_full(inst.exact, t)) << seed;
        EXPECT_TRUE(bipartite_connected(flatten(inst.exact, dims.size()))) << seed;
    }
}

TEST(ObservationSet, BadDims) {
    EXPECT_THROW(random_observation_set({}, 1), std::invalid_argument);
    EXPECT_THROW(random_observation_set({3, 0}, 1), std::invalid_argument);
}

TEST(Perturb, RelativeBoundAndZeroEps) {
    const auto inst = make_instance({{6, 7, 8}, 3, 0.0});
    const double eps = 1e-2;
    const auto noisy = perturb(inst.exact, eps, 3);
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        const double a = inst.exact.entries()[i].value, b = noisy.entries()[i].value;
        EXPECT_LE(std::abs(b - a), eps * std::abs(a) * (1 + 1e-15));
    }
    const auto same = perturb(inst.exact, 0.0, 3);
    for (std::size_t i = 0; i < same.size(); ++i) EXPECT_EQ(same.entries()[i].value, inst.exact.entries()[i].value);
    EXPECT_THROW(perturb(inst.exact, -1.0, 3), std::invalid_argument);
}

TEST(Instance, NoiseNormAndExactValues) {
    const auto inst = make_instance({{5, 6, 7}, 21, 1e-2});
    double s = 0;
    for (std::size_t i = 0; i < inst.exact.size(); ++i) {
        const auto& e = inst.exact.entries()[i];
        double p = 1;
        for (std::size_t t = 0; t < 3; ++t) p *= inst.truth.factors[t][e.index[t] - 1];
        EXPECT_DOUBLE_EQ(e.value, p);
        const double d = inst.noisy.entries()[i].value - e.value;
        s += d * d;
    }
    EXPECT_NEAR(inst.noise_norm, std::sqrt(s), 1e-15);
    EXPECT_GT(inst.noise_norm, 0.0);
}

TEST(Instance, SameSeedDifferentEpsSharesTruthAndPattern) {
    const auto a = make_instance({{5, 6, 7}, 4, 1e-2});
    const auto b = make_instance({{5, 6, 7}, 4, 1e-3});
    EXPECT_EQ(a.truth.factors, b.truth.factors);
    ASSERT_EQ(a.noisy.size(), b.noisy.size());
    // the same uniform draws, scaled by eps
    for (std::size_t i = 0; i < a.noisy.size(); ++i) {
        const double x = a.exact.entries()[i].value;
        const double ra = (a.noisy.entries()[i].value / x - 1) / 1e-2;
        const double rb = (b.noisy.entries()[i].value / x - 1) / 1e-3;
        EXPECT_NEAR(ra, rb, 1e-9);
    }
}
