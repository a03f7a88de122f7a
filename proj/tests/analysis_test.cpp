#include <gtest/gtest.h>

#include <random>

#include "r1c/analysis.hpp"
#include "r1c/generator.hpp"
#include "support.hpp"

using namespace r1c;
using r1c::testing::load_fixture;
using r1c::testing::matrix;

namespace {

// Random connected pattern: a spanning path plus a few extra cells, filled
// with a rank-one matrix whose entries stay away from zero.
PartialTensor connected_rank_one(std::size_t n1, std::size_t n2, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    std::bernoulli_distribution flip(0.5);
    std::vector<double> u(n1), v(n2);
    for (auto& x : u) x = flip(rng) ? mag(rng) : -mag(rng);
    for (auto& x : v) x = flip(rng) ? mag(rng) : -mag(rng);
    std::set<std::pair<std::size_t, std::size_t>> cells;
    const std::size_t n = std::max(n1, n2);
    for (std::size_t l = 0; l < n; ++l) {
        cells.insert({l % n1, l % n2});
        if (l + 1 < n) cells.insert({(l + 1) % n1, l % n2});
    }
    std::uniform_int_distribution<std::size_t> r1(0, n1 - 1), r2(0, n2 - 1);
    for (int extra = 0; extra < 3; ++extra) cells.insert({r1(rng), r2(rng)});
    std::vector<std::tuple<std::size_t, std::size_t, double>> list;
    for (auto [i, j] : cells) list.emplace_back(i + 1, j + 1, u[i] * v[j]);
    return matrix(n1, n2, list);
}

}  // namespace

TEST(Extractable, SmallMatrix) {
    const auto a = matrix(3, 3, {{1, 1, 2.0}, {1, 2, -4.0}, {1, 3, 6.0}, {2, 1, 3.0}, {2, 2, -6.0}, {3, 1, -1.0}});
    const auto d = is_extractable(flatten(a, 2));
    EXPECT_TRUE(d.extractable);
    EXPECT_EQ(d.nullspace_dim, 1u);
    EXPECT_EQ(d.nrows, 4u);
}

TEST(Extractable, ConnectedButZeroDimensional) {
    const auto a = matrix(3, 3, {{1, 1, 1.0}, {1, 2, 1.0}, {2, 1, 2.0}, {2, 2, 3.0}, {2, 3, 4.0}, {3, 2, 5.0}});
    const auto view = flatten(a, 2);
    const auto d = is_extractable(view);
    EXPECT_FALSE(d.extractable);
    EXPECT_EQ(d.nullspace_dim, 0u);
    EXPECT_TRUE(bipartite_connected(view));
}

TEST(Extractable, ZeroRowsTransposeDiffers) {
    const auto a = matrix(3, 3, {{1, 1, 1.0}, {1, 2, 1.0}, {2, 1, 0.0}, {2, 3, 0.0}, {3, 1, 0.0}});
    const auto direct = is_extractable(flatten(a, 2));
    const auto transposed = is_extractable(flatten(a, 2).transposed());
    EXPECT_TRUE(direct.extractable);
    EXPECT_EQ(direct.nullspace_dim, 1u);
    EXPECT_FALSE(transposed.extractable);
    EXPECT_EQ(transposed.nullspace_dim, 2u);
}

TEST(Extractable, ExtractableButNotCompletable) {
    const auto a = matrix(2, 2, {{1, 1, 1.0}, {2, 1, 0.0}, {2, 2, 1.0}});
    EXPECT_TRUE(is_extractable(flatten(a, 2)).extractable);
}

TEST(Connected, IsolatedColumnVertex) {
    const auto a = matrix(2, 2, {{1, 1, 1.0}, {2, 1, 2.0}});
    EXPECT_FALSE(bipartite_connected(flatten(a, 2)));
    EXPECT_FALSE(bipartite_connected(flatten(a, 1)));
}

TEST(Connected, CompletePattern) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> cells;
    for (std::size_t i = 1; i <= 3; ++i)
        for (std::size_t j = 1; j <= 4; ++j) cells.emplace_back(i, j, 1.0);
    EXPECT_TRUE(bipartite_connected(flatten(matrix(3, 4, cells), 2)));
}

TEST(Connected, TensorViewUsesObservedRowLabels) {
    const auto a = load_fixture("cube333.json");
    EXPECT_TRUE(bipartite_connected(flatten(a, 3)));
}

TEST(ModFull, ExactOrderFourEveryMode) {
    const auto a = load_fixture("exact4.json");
    for (std::size_t t = 1; t <= 4; ++t) EXPECT_TRUE(is_mod_full(a, t)) << t;
}

TEST(ModFull, EmptyAndMissing) {
    EXPECT_FALSE(is_mod_full(PartialTensor({2, 2}, {}), 1));
    const auto a = matrix(2, 2, {{1, 1, 1.0}, {1, 2, 1.0}});
    EXPECT_FALSE(is_mod_full(a, 1));
    EXPECT_TRUE(is_mod_full(a, 2));
    EXPECT_THROW(is_mod_full(a, 3), std::invalid_argument);
}

TEST(Hypotheses, ExactOrderFourHasNone) {
    EXPECT_TRUE(verify_unique_completion_hypotheses(load_fixture("exact4.json")).empty());
}

TEST(Hypotheses, ZeroEntryAndMissingCoordinate) {
    const auto zero = matrix(2, 2, {{1, 1, 1.0}, {1, 2, 0.0}, {2, 1, 1.0}});
    const auto v = verify_unique_completion_hypotheses(zero);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], "nonzero-entries violated at (1,2)");

    const auto missing = matrix(2, 2, {{1, 1, 1.0}, {1, 2, 2.0}});
    const auto w = verify_unique_completion_hypotheses(missing);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0], "mod-1 fullness violated");
}

TEST(Determinable, Cube) {
    const auto r = is_determinable(load_fixture("cube333.json"));
    EXPECT_TRUE(r.determinable);
    ASSERT_TRUE(r.witness_chain.has_value());
    ASSERT_EQ(r.witness_chain->size(), 2u);
    EXPECT_EQ(r.witness_chain->front().mode, 3u);
    EXPECT_FALSE(r.extractable_per_mode.at(1).extractable);
    EXPECT_TRUE(r.extractable_per_mode.at(3).extractable);
}

TEST(Determinable, ChainSix) {
    const auto a = load_fixture("chain6.json");
    const auto r = is_determinable(a);
    EXPECT_TRUE(r.determinable);
    ASSERT_TRUE(r.witness_chain.has_value());
    EXPECT_EQ(r.witness_chain->size(), 5u);
    for (const auto& step : *r.witness_chain) EXPECT_EQ(step.nullspace_dim, 1u);
}

TEST(Determinable, ChainSixByModesSixFiveFourThree) {
    // walk the chain 6,5,4,3 by hand: each level has a one-dimensional solution space
    PartialTensor level = load_fixture("chain6.json");
    for (std::size_t k : {6, 5, 4, 3}) {
        const auto view = flatten(level, k);
        const auto sys = build_system(view);
        ASSERT_EQ(nullspace_dimension(sys), 1u) << "mode " << k;
        const auto trip = smallest_singular(sys);
        level = reshape_solution(std::span<const double>(trip.right_vector.data(), trip.right_vector.size()), view);
    }
    EXPECT_EQ(level.order(), 2u);
    EXPECT_EQ(level.size(), 3u);
    const bool either = is_extractable(flatten(level, 2)).extractable || is_extractable(flatten(level, 1)).extractable;
    EXPECT_TRUE(either);
}

TEST(Determinable, NonUniqueNotDeterminable) {
    const auto r = is_determinable(load_fixture("nonunique334.json"));
    EXPECT_FALSE(r.determinable);
    EXPECT_FALSE(r.witness_chain.has_value());
    EXPECT_EQ(r.extractable_per_mode.at(3).nullspace_dim, 2u);
}

TEST(Determinable, RequiresOrderTwo) {
    EXPECT_THROW(is_determinable(PartialTensor({3}, {{{1}, 1.0}})), std::invalid_argument);
}

TEST(Determinable, ReportFlagsHypotheses) {
    const auto r = is_determinable(load_fixture("exact4.json"));
    EXPECT_TRUE(r.determinable);
    EXPECT_TRUE(r.nonzero_entries);
    EXPECT_TRUE(r.violated_hypotheses.empty());
    for (std::size_t t = 1; t <= 4; ++t) EXPECT_TRUE(r.mod_full.at(t));
}

TEST(Properties, ConnectedCompletableIsExtractableBothWays) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n1 = 2 + trial % 6, n2 = 2 + (trial * 5) % 7;
        const auto a = connected_rank_one(n1, n2, rng);
        const auto view = flatten(a, 2);
        ASSERT_TRUE(bipartite_connected(view));
        const auto d = is_extractable(view);
        EXPECT_TRUE(d.extractable) << n1 << "x" << n2;
        EXPECT_TRUE(is_extractable(view.transposed()).extractable) << n1 << "x" << n2;
        const auto trip = smallest_singular(build_system(view));
        EXPECT_TRUE(near_zero_entries(trip.right_vector).empty());
    }
}

TEST(Properties, GeneratedInstancesAreDeterminable) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Dims dims{2 + seed % 4, 3 + seed % 3, 2 + seed % 5};
        const auto inst = make_instance({dims, seed, 0.0});
        const auto r = is_determinable(inst.exact);
        EXPECT_TRUE(r.determinable) << "seed " << seed;
        EXPECT_TRUE(r.violated_hypotheses.empty()) << "seed " << seed;
    }
}

TEST(NearZero, Threshold) {
    Eigen::VectorXd v(4);
    v << 1.0, 1e-9, -0.5, 0.0;
    EXPECT_EQ(near_zero_entries(v), (std::vector<std::size_t>{1, 3}));
}
