#include <cmath>

#include <gtest/gtest.h>

#include "afc/optimize.hpp"

using namespace afc;

namespace {

SearchSpace box2()
{
    return {{{"x", -2.0, 2.0, -1.5}, {"y", -1.0, 3.0, 2.5}}};
}

double bowl(const std::vector<double>& v)
{
    return -(std::pow(v[0] - 0.7, 2) + 3 * std::pow(v[1] - 1.3, 2));
}

}  // namespace

TEST(Maximize, FindsInteriorOptimum)
{
    const auto r = maximize(box2(), bowl, OptimizerOptions{200, 1, 0.25, 1e-6});
    EXPECT_NEAR(r.value("x"), 0.7, 1e-3);
    EXPECT_NEAR(r.value("y"), 1.3, 1e-3);
    EXPECT_LE(r.evaluations, 200);
    EXPECT_GT(r.best_objective, r.initial_objective);
}

TEST(Maximize, OptimumOnBoundary)
{
    const auto r = maximize(box2(), [](const std::vector<double>& v) { return v[0] + v[1]; }, OptimizerOptions{150});
    EXPECT_NEAR(r.value("x"), 2.0, 1e-6);
    EXPECT_NEAR(r.value("y"), 3.0, 1e-6);
}

TEST(Maximize, TraceIsMonotoneAndDeterministic)
{
    const auto a = maximize(box2(), bowl, OptimizerOptions{80, 7});
    const auto b = maximize(box2(), bowl, OptimizerOptions{80, 7});
    EXPECT_EQ(a.best, b.best);
    EXPECT_EQ(a.trace, b.trace);
    ASSERT_EQ(static_cast<int>(a.trace.size()), a.evaluations);
    for (std::size_t i = 1; i < a.trace.size(); ++i) EXPECT_GE(a.trace[i], a.trace[i - 1]);
    EXPECT_EQ(a.trace.back(), a.best_objective);
}

TEST(Maximize, FixedParameterStaysFixed)
{
    SearchSpace s{{{"x", -2.0, 2.0, 0.0}, {"y", 0.4, 0.4, 0.4}}};
    const auto r = maximize(s, bowl, OptimizerOptions{100});
    EXPECT_DOUBLE_EQ(r.value("y"), 0.4);
    EXPECT_NEAR(r.value("x"), 0.7, 1e-3);
}

TEST(Maximize, RejectsInvalidSpaces)
{
    EXPECT_THROW(maximize({{{"x", 1.0, 0.0, 0.5}}}, bowl), ValidationError);
    EXPECT_THROW(maximize({{{"x", 0.0, 1.0, 2.0}}}, bowl), ValidationError);
    EXPECT_THROW(maximize(SearchSpace{}, bowl), ValidationError);
    EXPECT_THROW(maximize(box2(), bowl, OptimizerOptions{0}), ValidationError);
    EXPECT_THROW(box2().at("z"), ValidationError);
}

TEST(ControlOptimization, ReachesNearUnitTransferWithHigherRabi)
{
    const auto space = control_space({"", 0.5e6, 2.4e6, 1.2e6}, {"", 300e-9, 1.5e-6, 600e-9}, {"", 1e6, 6e6, 2e6});
    const auto r = optimize_control(space, 2e6, 150);
    EXPECT_GT(r.best_objective, 0.99);
    EXPECT_GE(r.best_objective, r.initial_objective);
    EXPECT_LE(r.value("peak_rabi_hz"), 2.4e6);
}

TEST(ControlOptimization, CappedSpaceStaysBelowCeiling)
{
    const auto space = control_space({"", 0.3e6, 1.2e6, 0.8e6}, {"", 200e-9, 600e-9, 400e-9}, {"", 0.5e6, 2e6, 1e6});
    const auto r = optimize_control(space, 2e6, 60);
    const double ceiling = control_transfer(1.2e6, 600e-9, 2e6, 2e6, ControlObjective{});
    EXPECT_LE(r.best_objective, ceiling + 0.01);
    EXPECT_GT(r.best_objective, r.initial_objective);
}

TEST(ControlOptimization, RejectsMalformedSpace)
{
    SearchSpace wrong{{{"duration_s", 1e-7, 1e-6, 5e-7}}};
    EXPECT_THROW(optimize_control(wrong, 2e6, 60), ValidationError);
    const auto space = control_space({"", 0.5e6, 2.4e6, 1.2e6}, {"", 300e-9, 1.5e-6, 600e-9}, {"", 1e6, 6e6, 2e6});
    EXPECT_THROW(optimize_control(space, 2e6, 10), ValidationError);
}

TEST(CombOptimization, ImprovesOverStartAndRejectsLowFinesse)
{
    StorageSequence base;
    base.comb.n_peaks = 5;
    base.input_fwhm_s = 250e-9;
    CombObjective obj;
    obj.tradeoff_points = 3;
    const auto space = comb_space({"", 1.0, 8.0, 2.0}, {"", 1.5, 10.0, 3.0});
    const auto r = optimize_comb(space, 1e6, base, 14, OptimizerOptions{}, obj);
    EXPECT_GE(r.search.best_objective, r.search.initial_objective);
    EXPECT_GT(r.final_eta_e, 0.0);
    EXPECT_EQ(r.tradeoff.size(), 3u);
    const auto bad = comb_space({"", 1.0, 8.0, 2.0}, {"", 0.5, 10.0, 3.0});
    EXPECT_THROW(optimize_comb(bad, 1e6, base, 5), ValidationError);
}
