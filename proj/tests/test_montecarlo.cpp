#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "eyewit/error.hpp"
#include "eyewit/montecarlo.hpp"
#include "oracles.hpp"

using namespace eyewit;

namespace {

const CellProbabilities kPaperCell{0.2659552252, 0.06971250589};

}  // namespace

TEST(Substreams, DistinctAndStable) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(substream_seed(42, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(substream_seed(42, 7), substream_seed(42, 7));
    EXPECT_NE(substream_seed(42, 7), substream_seed(43, 7));
}

TEST(SimulateCounts, Deterministic) {
    EXPECT_EQ(simulate_counts(kPaperCell, 100000, 9), simulate_counts(kPaperCell, 100000, 9));
    const auto c = simulate_counts(kPaperCell, 0, 9);
    EXPECT_EQ(c.ns, 0);
    EXPECT_THROW(simulate_counts({0.2, 0.3}, 10, 1), Error);
}

TEST(SimulateCounts, PlaneCovarianceMatchesPropagation) {
    const auto plan = make_plan(kPaperCell, 40.0, 0.01);
    const std::int64_t n = 200000;
    const int trials = 4000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < trials; ++i) {
        const auto c = simulate_counts(kPaperCell, n, substream_seed(3, i));
        const double fs = static_cast<double>(c.ns) / n;
        const auto p = plan.to_plane(fs * fs, static_cast<double>(c.nc) / n);
        sx += p.x;
        sy += p.y;
        sxx += p.x * p.x;
        syy += p.y * p.y;
        sxy += p.x * p.y;
    }
    const double mx = sx / trials, my = sy / trials;
    const double vxx = sxx / trials - mx * mx, vyy = syy / trials - my * my, vxy = sxy / trials - mx * my;
    const auto cov = oracle::plane_covariance(plan);
    // sampling error of a variance estimate is ~ sqrt(2 / trials) = 2.2%
    EXPECT_NEAR(vxx * n / cov.xx, 1.0, 0.1);
    EXPECT_NEAR(vyy * n / cov.yy, 1.0, 0.1);
    EXPECT_LT(std::abs(vxy) / std::sqrt(vxx * vyy), 0.07);
}

TEST(Wilson, KnownValues) {
    const auto w = wilson_interval(5, 10);
    EXPECT_NEAR(w.low, 0.2365930905, 1e-9);
    EXPECT_NEAR(w.high, 0.7634069095, 1e-9);
    const auto z = wilson_interval(0, 100);
    EXPECT_EQ(z.low, 0.0);
    EXPECT_GT(z.high, 0.0);
    EXPECT_THROW(wilson_interval(3, 2), Error);
}

TEST(Marginal, MatchesAnalyticStopProbability) {
    auto plan = make_plan(kPaperCell, 40.0, 0.1);
    const std::int64_t n = 20000;
    CriticalOptions opt;
    opt.strategy = ClassicalStrategy::projected;
    const double chi0 = critical_chi0(0.1, n, plan, opt);
    const double p = p_stop(n, chi0, plan);
    SimulationOptions sim;
    sim.trials = 2000;
    sim.master_seed = 17;
    const auto m = marginal_stop_frequency(kPaperCell, plan, n, chi0, sim);
    EXPECT_LT(std::abs(m.fraction - p), 4.0 * std::sqrt(p * (1 - p) / sim.trials));
    // classical cell is accepted at most about epsilon of the time
    const auto mc = marginal_stop_frequency(plan.classical_cell(), plan, n, chi0, sim);
    EXPECT_LT(mc.fraction, 0.1 + 4.0 * std::sqrt(0.09 / sim.trials));
}

TEST(StopCurve, ThreadCountDoesNotChangeResult) {
    auto plan = make_plan(kPaperCell, 40.0, 0.1);
    ExpectedRunsOptions er;
    er.critical.strategy = ClassicalStrategy::projected;
    er.stop_tail = 1e-2;
    expected_runs(0.1, 5000, plan, er);
    SimulationOptions sim;
    sim.trials = 300;
    sim.master_seed = 5;
    const auto a = empirical_stop_curve(kPaperCell, plan, 5000, sim);
    sim.threads = 3;
    const auto b = empirical_stop_curve(kPaperCell, plan, 5000, sim);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].fraction, b[i].fraction);
        if (i > 0) EXPECT_GE(a[i].fraction, a[i - 1].fraction);
    }
}

TEST(StopCurve, AnalyticBelowEmpiricalCumulative) {
    auto plan = make_plan(kPaperCell, 40.0, 0.1);
    ExpectedRunsOptions er;
    er.critical.strategy = ClassicalStrategy::projected;
    er.stop_tail = 1e-2;
    const auto curve = expected_runs(0.1, 5000, plan, er);
    SimulationOptions sim;
    sim.trials = 1000;
    sim.master_seed = 23;
    const auto emp = empirical_stop_curve(kPaperCell, plan, 5000, sim);
    ASSERT_EQ(emp.size(), curve.grid.size());
    for (std::size_t i = 0; i < emp.size(); ++i) {
        const double half = 0.5 * (emp[i].wilson_high - emp[i].wilson_low);
        EXPECT_LE(curve.grid[i].p_stop, emp[i].fraction + 3.0 * half) << emp[i].n;
    }
}

TEST(StopCurve, TailDecreasingFrom) {
    StopCurve c;
    c.grid = {{10, 0, 0.1}, {20, 0, 0.5}, {30, 0, 0.8}, {40, 0, 0.95}};
    // N(1-P): 9, 10, 6, 2
    EXPECT_EQ(tail_decreasing_from(c), std::optional<std::int64_t>(20));
    c.grid = {{10, 0, 0.1}};
    EXPECT_FALSE(tail_decreasing_from(c).has_value());
}
