#pragma once

// Trajectory-level simulation of the run sequence: counts are drawn block by
// block on the coarse grid and checked against the plan's critical values.

#include <cstdint>
#include <optional>
#include <vector>

#include "eyewit/statistics.hpp"

namespace eyewit {

/// Seed of substream `index` derived from a master seed (splitmix64 of the
/// pair), so every trajectory is reproducible on its own.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

struct Counts {
    std::int64_t ns = 0;
    std::int64_t nc = 0;
    friend bool operator==(const Counts &, const Counts &) = default;
};

/// Singles and coincidences after n i.i.d. runs.
Counts simulate_counts(const CellProbabilities &cell, std::int64_t n, std::uint64_t seed);

struct TrajectoryResult {
    std::optional<std::int64_t> stop_run;
    Counts counts_at_stop;
    std::uint64_t seed = 0;
};

/// One sequential experiment checked at coarse_n, 2 coarse_n, ... up to
/// max_n against plan.chi0_at(N).
TrajectoryResult simulate_trajectory(const CellProbabilities &cell, const CertificationPlan &plan,
                                     std::int64_t coarse_n, std::int64_t max_n, std::uint64_t seed);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for k successes out of n at normal quantile z.
Interval wilson_interval(std::int64_t k, std::int64_t n, double z = 1.959963984540054);

struct EmpiricalStopPoint {
    std::int64_t n = 0;
    double fraction = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
};

struct SimulationOptions {
    std::int64_t trials = 1000;
    std::uint64_t master_seed = 1;
    /// Last checkpoint; defaults to the largest N of the plan's table.
    std::int64_t max_n = 0;
    int threads = 1;
};

/// Cumulative fraction of trajectories stopped by each coarse-grid N.
std::vector<EmpiricalStopPoint> empirical_stop_curve(const CellProbabilities &cell_q, const CertificationPlan &plan,
                                                     std::int64_t coarse_n, const SimulationOptions &options);

struct MarginalFrequency {
    double fraction = 0.0;
    double standard_error = 0.0;
};

/// Fraction of independent experiments whose counts after exactly n runs
/// satisfy chi <= chi0.
MarginalFrequency marginal_stop_frequency(const CellProbabilities &cell, const CertificationPlan &plan,
                                          std::int64_t n, double chi0, const SimulationOptions &options);

/// Smallest grid N beyond which N (1 - P_stop(N)) decreases monotonically on
/// the computed curve, if any.
std::optional<std::int64_t> tail_decreasing_from(const StopCurve &curve);

}  // namespace eyewit
