#include <gtest/gtest.h>

#include <cmath>

#include "bhldp/fluid_limit.hpp"

using namespace bhldp;

namespace {

// Independent root finder for lambda x^4 (1 - x) = mu on [lo, hi].
double bisect_stationary(double lambda, double mu, double lo, double hi) {
    auto g = [&](double x) { return lambda * std::pow(x, 4) * (1.0 - x) - mu; };
    const bool lo_neg = g(lo) < 0.0;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        ((g(m) < 0.0) == lo_neg ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(FluidRhs, DirectEvaluation) {
    const ModelParams p{1.0, 1.0, 100, 1.0};
    const FluidVelocity v = fluid_rhs(p, {0.5, 0.0});
    EXPECT_DOUBLE_EQ(v.dx, 0.125 - 4.0);
    EXPECT_DOUBLE_EQ(v.dy, 4.0);
}

TEST(FluidRhs, ZeroAtEmptyHole) {
    const ModelParams p{3.0, 2.0, 100, 1.0};
    const FluidVelocity v = fluid_rhs(p, {0.0, 0.7});
    EXPECT_EQ(v.dx, 0.0);
    EXPECT_EQ(v.dy, 0.0);
}

TEST(FluidRhs, SumIsAbsorption) {
    const ModelParams p{7.0, 0.3, 100, 1.0};
    for (double x = 0.05; x <= 1.0; x += 0.05) {
        const FluidVelocity v = fluid_rhs(p, {x, 0.0});
        EXPECT_NEAR(v.dx + v.dy, 7.0 * x * x * (1.0 - x), 1e-12 * (1.0 + v.dy));
    }
}

TEST(FluidRhs, RejectsOutsideUnitInterval) {
    const ModelParams p{1.0, 1.0, 100, 1.0};
    EXPECT_THROW(fluid_rhs(p, {-0.1, 0.0}), domain_error);
    EXPECT_THROW(fluid_rhs(p, {1.1, 0.0}), domain_error);
}

TEST(Integrate, StationaryStartStaysPut) {
    const ModelParams p{100.0, 1.0, 100, 2.0};
    const double xs = bisect_stationary(100.0, 1.0, 0.8, 1.0);
    const FluidSolution sol = integrate(p, {xs, 0.0}, 2.0);
    const double emit = 1.0 / (xs * xs);
    for (std::size_t i = 0; i < sol.path.size(); ++i) {
        EXPECT_NEAR(sol.path.x[i], xs, 1e-9);
        EXPECT_NEAR(sol.path.y[i], emit * sol.path.t[i], 1e-8);
    }
}

TEST(Integrate, ConvergesToStableRoot) {
    const ModelParams p{100.0, 1.0, 100, 5.0};
    const FluidSolution sol = integrate(p, {0.5, 0.0}, 5.0);
    EXPECT_NEAR(sol.path.x.back(), bisect_stationary(100.0, 1.0, 0.8, 1.0), 1e-8);
    EXPECT_NEAR(sol.path.x.back(), 0.9897, 5e-4);
}

TEST(Integrate, BelowUnstableRootCollapses) {
    const ModelParams p{100.0, 1.0, 100, 5.0};
    EXPECT_THROW(integrate(p, {0.3, 0.0}, 5.0), singular_approach);
}

TEST(Integrate, AboveThresholdDecreasesThenHitsSingularity) {
    const ModelParams p{1.0, 1.0, 100, 1.0};
    // Sign check on a grid: no stationary point, dx/dt < 0 everywhere on (0, 1].
    for (int i = 1; i <= 1000; ++i) EXPECT_LT(fluid_rhs(p, {i / 1000.0, 0.0}).dx, 0.0);

    const FluidSolution early = integrate(p, {1.0, 0.0}, 0.05);
    for (std::size_t i = 1; i < early.path.size(); ++i) EXPECT_LT(early.path.x[i], early.path.x[i - 1]);

    try {
        integrate(p, {1.0, 0.0}, 10.0);
        FAIL() << "expected singular_approach";
    } catch (const singular_approach& e) {
        // d(x^3)/dt = 3 lambda x^4 (1 - x) - 3 mu lies in [-3, -3 (1 - 0.08192)].
        EXPECT_GT(e.time(), 1.0 / 3.0 - 1e-3);
        EXPECT_LT(e.time(), 1.0 / (3.0 * (1.0 - existence_threshold)) + 1e-3);
    }
}

TEST(Integrate, EnergyBookkeeping) {
    const ModelParams p{20.0, 1.0, 100, 1.0};
    const FluidOptions opt{4096, {1e-11, 1e-13}};
    const FluidSolution sol = integrate(p, {0.9, 0.0}, 1.0, opt);
    // x + y - x(0) equals the absorbed mass; Simpson quadrature of A(x(t)).
    const auto& t = sol.path.t;
    const auto& x = sol.path.x;
    double absorbed = 0.0;
    for (std::size_t i = 0; i + 2 < t.size(); i += 2) {
        auto A = [&](std::size_t j) { return 20.0 * x[j] * x[j] * (1.0 - x[j]); };
        absorbed += (t[i + 2] - t[i]) / 6.0 * (A(i) + 4.0 * A(i + 1) + A(i + 2));
    }
    EXPECT_NEAR(x.back() + sol.path.y.back() - 0.9, absorbed, 1e-9);
}

TEST(Integrate, RejectsBadInput) {
    const ModelParams p{1.0, 1.0, 100, 1.0};
    EXPECT_THROW(integrate(p, {1.5, 0.0}, 1.0), domain_error);
    EXPECT_THROW(integrate(p, {0.5, -1.0}, 1.0), domain_error);
    EXPECT_THROW(integrate(p, {0.5, 0.0}, 0.0), invalid_parameter);
    EXPECT_THROW(integrate(p, {0.5, 0.0}, 1.0, {100, {0.0, 1e-12}}), invalid_parameter);
}

TEST(StationaryPoints, TwoRootsBelowThreshold) {
    const StationaryAnalysis a = stationary_points({100.0, 1.0, 100, 1.0});
    ASSERT_TRUE(a.exists);
    ASSERT_EQ(a.roots.size(), 2u);
    EXPECT_NEAR(a.roots[0].x, bisect_stationary(100.0, 1.0, 0.0, 0.8), 1e-12);
    EXPECT_NEAR(a.roots[1].x, bisect_stationary(100.0, 1.0, 0.8, 1.0), 1e-12);
    EXPECT_NEAR(a.roots[0].x, 0.352, 1e-3);
    EXPECT_NEAR(a.roots[1].x, 0.9897, 2e-4);
    EXPECT_EQ(a.roots[0].stability, Stability::unstable);
    EXPECT_EQ(a.roots[1].stability, Stability::stable);
    EXPECT_GT(a.margin, 0.0);
}

TEST(StationaryPoints, NoneAboveThreshold) {
    const StationaryAnalysis a = stationary_points({1.0, 1.0, 100, 1.0});
    EXPECT_FALSE(a.exists);
    EXPECT_TRUE(a.roots.empty());
    EXPECT_LT(a.margin, 0.0);
}

TEST(StationaryPoints, ThresholdIsMaximumOfQuintic) {
    double best = 0.0, arg = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double x = i / 100000.0, v = std::pow(x, 4) * (1.0 - x);
        if (v > best) best = v, arg = x;
    }
    EXPECT_NEAR(existence_threshold, best, 1e-12);
    EXPECT_NEAR(arg, 0.8, 1e-5);
}

TEST(StationaryPoints, DoubleRootAtThreshold) {
    const StationaryAnalysis a = stationary_points({1.0, 0.08192, 100, 1.0});
    ASSERT_TRUE(a.exists);
    ASSERT_EQ(a.roots.size(), 1u);
    EXPECT_NEAR(a.roots[0].x, 0.8, 1e-6);
    EXPECT_EQ(a.roots[0].stability, Stability::degenerate);
}

TEST(StationaryPoints, RootsMergeApproachingThreshold) {
    double prev_gap = 1.0;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
        const StationaryAnalysis a = stationary_points({1.0, existence_threshold * (1.0 - eps), 100, 1.0});
        ASSERT_EQ(a.roots.size(), 2u);
        const double gap = a.roots[1].x - a.roots[0].x;
        EXPECT_LT(gap, prev_gap);
        EXPECT_LT(a.roots[0].x, 0.8);
        EXPECT_GT(a.roots[1].x, 0.8);
        prev_gap = gap;
    }
}
