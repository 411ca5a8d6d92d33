#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "eyewit/error.hpp"
#include "eyewit/optimizer.hpp"

using namespace eyewit;

namespace {

double toy(std::span<const double> x) {
    return (x[0] - 1.3) * (x[0] - 1.3) + 4.0 * (x[1] + 0.4) * (x[1] + 0.4) + 0.5 * (x[0] - 1.3) * (x[1] + 0.4);
}

const std::vector<ParameterBound> kBox{{"u", -2.0, 3.0, 6}, {"v", -1.0, 1.0, 5}};

}  // namespace

TEST(Minimize, FindsInteriorMinimum) {
    OptimizeOptions opt;
    opt.xtol = 1e-6;
    opt.ftol = 1e-12;
    const auto r = minimize(toy, kBox, opt);
    EXPECT_NEAR(r.best[0], 1.3, 1e-3);
    EXPECT_NEAR(r.best[1], -0.4, 1e-3);
    EXPECT_LE(r.value, r.best_grid_value);
    EXPECT_FALSE(r.budget_exhausted);
    EXPECT_EQ(r.names, (std::vector<std::string>{"u", "v"}));
}

TEST(Minimize, DeterministicTrace) {
    const auto a = minimize(toy, kBox);
    const auto b = minimize(toy, kBox);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        EXPECT_EQ(a.trace[i].x, b.trace[i].x);
        EXPECT_EQ(a.trace[i].value, b.trace[i].value);
        EXPECT_EQ(a.trace[i].stage, b.trace[i].stage);
    }
}

TEST(Minimize, ScalingObjectiveKeepsArgmin) {
    const auto a = minimize(toy, kBox);
    const auto b = minimize([](std::span<const double> x) { return 37.0 * toy(x); }, kBox);
    EXPECT_EQ(a.best, b.best);
}

TEST(Minimize, RefinementNeverWorseThanGrid) {
    // Bumpy objective where Nelder-Mead may wander.
    const auto f = [](std::span<const double> x) { return std::sin(5 * x[0]) * std::cos(3 * x[1]) + 0.1 * x[0]; };
    const auto r = minimize(f, kBox);
    EXPECT_LE(r.value, r.best_grid_value);
    std::size_t grid = 0;
    for (const auto &e : r.trace) grid += e.stage == "grid";
    EXPECT_EQ(grid, 30u);
}

TEST(Minimize, FailedPointsAreRecorded) {
    const auto f = [](std::span<const double> x) {
        if (x[0] > 1.0) throw Error(ErrorCode::non_convergence, "too far");
        return (x[0] - 0.5) * (x[0] - 0.5);
    };
    const auto r = minimize(f, {{"u", 0.0, 2.0, 9}});
    EXPECT_NEAR(r.best[0], 0.5, 1e-3);
    bool saw_failure = false;
    for (const auto &e : r.trace) {
        if (!e.ok) {
            saw_failure = true;
            EXPECT_EQ(e.value, std::numeric_limits<double>::infinity());
            EXPECT_FALSE(e.error.empty());
        }
    }
    EXPECT_TRUE(saw_failure);
}

TEST(Minimize, AllGridPointsFailing) {
    const auto f = [](std::span<const double>) -> double { throw Error(ErrorCode::domain_error, "nope"); };
    try {
        minimize(f, kBox);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::infeasible_region);
    }
}

TEST(Minimize, BudgetExhaustion) {
    OptimizeOptions opt;
    opt.budget = 35;
    const auto r = minimize(toy, kBox, opt);
    EXPECT_TRUE(r.budget_exhausted);
    EXPECT_LE(r.trace.size(), 35u);
    EXPECT_LE(r.value, r.best_grid_value);
}

TEST(Minimize, InvalidBounds) {
    EXPECT_THROW(minimize(toy, {{"u", 1.0, 0.0, 3}}), Error);
    EXPECT_THROW(minimize(toy, {}), Error);
    OptimizeOptions opt;
    opt.budget = 0;
    EXPECT_THROW(minimize(toy, kBox, opt), Error);
}

TEST(ChainObjective, OneParameterAlphaHasInteriorMinimum) {
    OptimizationSpec spec;
    spec.objective = ObjectiveKind::p_stop;
    spec.epsilon = 0.1;
    spec.fixed_n = 20000;
    spec.strategy = ClassicalStrategy::projected;
    spec.bounds = {{"alpha", 6.0, 14.0, 9}};
    spec.options.xtol = 1e-2;
    const auto r = optimize(spec, ChainConfig{}, 40.0);
    EXPECT_GT(r.best[0], 6.5);
    EXPECT_LT(r.best[0], 13.5);
}

TEST(ChainObjective, SpecValidation) {
    OptimizationSpec spec;
    spec.bounds = {{"gamma", 0.0, 1.0, 3}};
    EXPECT_THROW(spec.validate(), Error);
    spec.bounds = {{"alpha", 1.0, 2.0, 3}};
    EXPECT_NO_THROW(spec.validate());
}
