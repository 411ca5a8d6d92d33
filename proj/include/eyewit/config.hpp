#pragma once

// Run configuration: a JSON document with one section per parameter group.
// Every field is optional and defaults to the published operating point;
// unknown fields are rejected.

#include <cstdint>
#include <string>
#include <string_view>

#include "eyewit/detector.hpp"
#include "eyewit/montecarlo.hpp"
#include "eyewit/optimizer.hpp"
#include "eyewit/pipeline.hpp"
#include "eyewit/preparation.hpp"
#include "eyewit/statistics.hpp"

namespace eyewit {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr const char *kResourceCeilingEnv = "EYEWIT_RESOURCE_CEILING";

struct RateInputs {
    double rep_rate = 80e6;
    double duty_cycle = 0.02;
    double p_pair = 0.8e-3;
    double eta_herald = 0.08;
    double noise_over_signal = 100.0;
    double extinction_ratio = 2000.0;
    /// Runs per second used to convert run counts into hours.
    double run_rate = 1.0;
};

struct RunConfig {
    DetectorModel eye = DetectorModel::hecht_eye();
    PreparationParams prep{};
    ComplexAmplitude alpha{10.99, 0.0};
    bool align_phase = true;
    double bs_reflectance = 0.5;
    double tail_tol = kDefaultTailTolerance;

    double epsilon = 0.01;
    std::int64_t coarse_n = 12500;
    double a = 40.0;
    double stop_tail = 1e-4;
    ClassicalStrategy strategy = ClassicalStrategy::scan;
    ClassicalScan scan{};
    double critical_rel_tol = 1e-3;

    std::uint64_t seed = 1;
    std::int64_t trials = 1000;
    int threads = 1;

    OptimizationSpec optimizer = default_optimizer_spec();
    RateInputs rates{};
    ResourceLimits limits{};

    ChainConfig chain() const;
    CriticalOptions critical() const;
    ExpectedRunsOptions expected_runs_options() const;
    SimulationOptions simulation() const;

    static OptimizationSpec default_optimizer_spec();
};

/// Parses and validates a configuration document. Throws Error with
/// parse_error (with line:column) or validation_error (naming the field).
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string &path);

/// Canonical JSON of the fully resolved configuration.
std::string dump_config(const RunConfig &config);

/// FNV-1a hash of the canonical dump, as 16 hex digits.
std::string config_hash(const RunConfig &config);

/// Applies the resource ceiling from the environment, if set.
void apply_environment(RunConfig &config);

}  // namespace eyewit
