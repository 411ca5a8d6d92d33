#pragma once

// Two-stage derivative-free search: a Cartesian grid over the bounds followed
// by Nelder-Mead refinement from the best grid point in coordinates scaled to
// the unit box.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eyewit/pipeline.hpp"
#include "eyewit/statistics.hpp"

namespace eyewit {

struct ParameterBound {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int grid_points = 2;
};

struct TraceEntry {
    std::string stage;
    std::vector<double> x;
    double value = 0.0;
    bool ok = true;
    std::string error;
};

struct OptimizeOptions {
    /// Maximum number of objective evaluations, grid included.
    int budget = 3000;
    /// Simplex size (unit-box coordinates) at which refinement stops.
    double xtol = 1e-3;
    /// Relative spread of simplex values at which refinement stops.
    double ftol = 1e-7;
};

struct OptimizeResult {
    std::vector<std::string> names;
    std::vector<double> best;
    double value = 0.0;
    double best_grid_value = 0.0;
    std::vector<TraceEntry> trace;
    bool budget_exhausted = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `f` over the box. Evaluations that throw eyewit::Error are
/// recorded in the trace with value +inf.
OptimizeResult minimize(const Objective &f, const std::vector<ParameterBound> &bounds,
                        const OptimizeOptions &options = {});

enum class ObjectiveKind {
    /// Mean number of runs at epsilon (minimized).
    expected_runs,
    /// 1 - P_stop at a fixed N and epsilon (minimized).
    p_stop,
};

/// Search over the chain parameters alpha, beta, a and optionally t.
struct OptimizationSpec {
    ObjectiveKind objective = ObjectiveKind::expected_runs;
    double epsilon = 0.01;
    std::int64_t fixed_n = 350000;
    std::int64_t coarse_n = 12500;
    double stop_tail = 1e-4;
    /// Run ceiling per evaluation; points needing more are recorded as failed.
    std::int64_t max_runs = 4'000'000;
    ClassicalStrategy strategy = ClassicalStrategy::scan;
    ClassicalScan scan{};
    /// Tolerance of the critical-value search inside each evaluation.
    double critical_rel_tol = 1e-5;
    std::vector<ParameterBound> bounds;
    OptimizeOptions options{};

    void validate() const;
};

/// Objective value of the chain at the given named parameters; names not
/// listed keep the values of `base` and `base_a`.
double chain_objective(const OptimizationSpec &spec, const ChainConfig &base, double base_a,
                       std::span<const std::string> names, std::span<const double> values,
                       const ResourceLimits &limits = {});

OptimizeResult optimize(const OptimizationSpec &spec, const ChainConfig &base, double base_a,
                        const ResourceLimits &limits = {});

/// Default search box around the published operating point.
std::vector<ParameterBound> default_bounds();

}  // namespace eyewit
