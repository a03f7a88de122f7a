#include <gtest/gtest.h>

#include <cmath>

#include "r1c/metrics.hpp"

using namespace r1c;

TEST(SinAngle, KnownAngles) {
    const std::vector<double> x{1, 0}, y{0, 2}, d{1, 1};
    EXPECT_NEAR(sin_angle(x, y), 1.0, 1e-15);
    EXPECT_NEAR(sin_angle(x, d), std::sqrt(0.5), 1e-15);
    EXPECT_EQ(sin_angle(x, std::vector<double>{-3, 0}), 0.0);
    EXPECT_THROW(sin_angle(x, std::vector<double>{0, 0}), std::invalid_argument);
    EXPECT_THROW(sin_angle(x, std::vector<double>{1, 0, 0}), std::invalid_argument);
}

TEST(SinAngle, ResolvesTinyAngles) {
    const double t = 1e-12;
    const std::vector<double> a{1, 0}, b{std::cos(t), std::sin(t)};
    EXPECT_NEAR(sin_angle(a, b), t, 1e-15);
}

TEST(CompletionErrors, HandComputed) {
    const PartialTensor omega({2, 2}, {{{1, 1}, 0.0}, {{2, 2}, 0.0}});
    const std::vector<std::vector<double>> truth{{1, 2}, {3, 4}}, est{{1, 2}, {3, 5}};
    const auto m = completion_errors(truth, est, 0.5, omega, 0.25);
    // only (2,2) differs: 2*4 vs 2*5
    EXPECT_DOUBLE_EQ(m.err_ab, 2.0);
    EXPECT_DOUBLE_EQ(m.err_rt, 4.0);
    EXPECT_TRUE(m.err_rt_defined);
    EXPECT_DOUBLE_EQ(m.density, 0.5);
    EXPECT_DOUBLE_EQ(m.runtime_seconds, 0.25);
    ASSERT_EQ(m.sin_per_mode.size(), 2u);
    EXPECT_NEAR(m.sin_per_mode[0], 0.0, 1e-15);
    const double c = (9.0 + 20.0) / (5.0 * std::sqrt(34.0));
    EXPECT_NEAR(m.sin_per_mode[1], std::sqrt(1 - c * c), 1e-12);
    EXPECT_NEAR(m.sin_theta, m.sin_per_mode[1] / 2, 1e-15);
}

TEST(CompletionErrors, GaugeInvariant) {
    const PartialTensor omega({2, 3}, {{{1, 1}, 0.0}, {{2, 3}, 0.0}, {{1, 2}, 0.0}});
    const std::vector<std::vector<double>> truth{{1, -2}, {3, 4, 0.5}};
    const std::vector<std::vector<double>> scaled{{-4, 8}, {-0.75, -1, -0.125}};
    const auto m = completion_errors(truth, scaled, 1.0, omega);
    EXPECT_NEAR(m.err_ab, 0.0, 1e-14);
    EXPECT_NEAR(m.sin_theta, 0.0, 1e-15);
}

TEST(CompletionErrors, ZeroNoiseAndBadInput) {
    const PartialTensor omega({2}, {{{1}, 0.0}});
    const std::vector<std::vector<double>> u{{1, 2}};
    const auto m = completion_errors(u, u, 0.0, omega);
    EXPECT_FALSE(m.err_rt_defined);
    EXPECT_TRUE(std::isnan(m.err_rt));
    EXPECT_THROW(completion_errors(u, std::vector<std::vector<double>>{{0, 0}}, 1.0, omega), std::invalid_argument);
    EXPECT_THROW(completion_errors(u, std::vector<std::vector<double>>{{1, 2, 3}}, 1.0, omega), std::invalid_argument);
    EXPECT_THROW(completion_errors(u, std::vector<std::vector<double>>{}, 1.0, omega), std::invalid_argument);
}
