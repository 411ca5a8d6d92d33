#include "eyewit/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "eyewit/error.hpp"

namespace eyewit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::int64_t draw_binomial(std::mt19937_64 &rng, std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<std::int64_t> dist(n, p);
    return dist(rng);
}

Counts draw_block(std::mt19937_64 &rng, const CellProbabilities &cell, std::int64_t n) {
    Counts c;
    c.ns = draw_binomial(rng, n, cell.ps);
    const double q = cell.ps > 0.0 ? std::clamp(cell.pc / cell.ps, 0.0, 1.0) : 0.0;
    c.nc = draw_binomial(rng, c.ns, q);
    return c;
}

// Runs body(i) for i in [0, count) on up to `threads` workers; results must
// be written to slot i so the outcome does not depend on scheduling.
template <typename F>
void parallel_for(std::int64_t count, int threads, F &&body) {
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::int64_t>(count, 256))));
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::int64_t i = w; i < count; i += workers) body(i);
        });
    }
}

void check_options(const SimulationOptions &options) {
    require(options.trials >= 1, ErrorCode::invalid_argument, "trials must be >= 1");
    require(options.threads >= 1, ErrorCode::invalid_argument, "threads must be >= 1");
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ index);
}

Counts simulate_counts(const CellProbabilities &cell, std::int64_t n, std::uint64_t seed) {
    cell.validate();
    require(n >= 0, ErrorCode::invalid_argument, "number of runs must be >= 0");
    std::mt19937_64 rng(seed);
    return draw_block(rng, cell, n);
}

TrajectoryResult simulate_trajectory(const CellProbabilities &cell, const CertificationPlan &plan,
                                     std::int64_t coarse_n, std::int64_t max_n, std::uint64_t seed) {
    cell.validate();
    require(coarse_n >= 1, ErrorCode::invalid_argument, "coarse_n must be >= 1");
    std::mt19937_64 rng(seed);
    TrajectoryResult out;
    out.seed = seed;
    Counts total;
    for (std::int64_t n = coarse_n; n <= max_n; n += coarse_n) {
        const Counts block = draw_block(rng, cell, coarse_n);
        total.ns += block.ns;
        total.nc += block.nc;
        if (estimator_chi(total.ns, total.nc, n, plan) <= plan.chi0_at(n)) {
            out.stop_run = n;
            out.counts_at_stop = total;
            return out;
        }
    }
    out.counts_at_stop = total;
    return out;
}

Interval wilson_interval(std::int64_t k, std::int64_t n, double z) {
    require(n > 0 && k >= 0 && k <= n, ErrorCode::invalid_argument, "Wilson interval needs 0 <= k <= n, n > 0");
    const double nd = static_cast<double>(n);
    const double p = static_cast<double>(k) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double centre = (p + z2 / (2.0 * nd)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

std::vector<EmpiricalStopPoint> empirical_stop_curve(const CellProbabilities &cell_q, const CertificationPlan &plan,
                                                     std::int64_t coarse_n, const SimulationOptions &options) {
    check_options(options);
    require(coarse_n >= 1, ErrorCode::invalid_argument, "coarse_n must be >= 1");
    std::int64_t max_n = options.max_n;
    if (max_n <= 0) {
        require(!plan.chi0_by_n.empty(), ErrorCode::invalid_argument, "plan has no critical-value table");
        max_n = plan.chi0_by_n.back().first;
    }
    const std::int64_t checkpoints = max_n / coarse_n;
    require(checkpoints >= 1, ErrorCode::invalid_argument, "max_n is below the first checkpoint");

    std::vector<std::int64_t> stop(static_cast<std::size_t>(options.trials), 0);
    parallel_for(options.trials, options.threads, [&](std::int64_t i) {
        const auto r = simulate_trajectory(cell_q, plan, coarse_n, max_n,
                                           substream_seed(options.master_seed, static_cast<std::uint64_t>(i)));
        stop[static_cast<std::size_t>(i)] = r.stop_run.value_or(0);
    });

    std::vector<std::int64_t> first_stops(static_cast<std::size_t>(checkpoints), 0);
    for (const auto s : stop) {
        if (s > 0) ++first_stops[static_cast<std::size_t>(s / coarse_n - 1)];
    }
    std::vector<EmpiricalStopPoint> out;
    out.reserve(first_stops.size());
    std::int64_t cumulative = 0;
    for (std::int64_t j = 0; j < checkpoints; ++j) {
        cumulative += first_stops[static_cast<std::size_t>(j)];
        const Interval w = wilson_interval(cumulative, options.trials);
        out.push_back({(j + 1) * coarse_n, static_cast<double>(cumulative) / static_cast<double>(options.trials),
                       w.low, w.high});
    }
    return out;
}

MarginalFrequency marginal_stop_frequency(const CellProbabilities &cell, const CertificationPlan &plan,
                                          std::int64_t n, double chi0, const SimulationOptions &options) {
    check_options(options);
    require(n >= 1, ErrorCode::invalid_argument, "number of runs must be >= 1");
    std::vector<char> hit(static_cast<std::size_t>(options.trials), 0);
    parallel_for(options.trials, options.threads, [&](std::int64_t i) {
        const Counts c = simulate_counts(cell, n, substream_seed(options.master_seed, static_cast<std::uint64_t>(i)));
        hit[static_cast<std::size_t>(i)] = estimator_chi(c.ns, c.nc, n, plan) <= chi0 ? 1 : 0;
    });
    const auto k = std::count(hit.begin(), hit.end(), 1);
    const double f = static_cast<double>(k) / static_cast<double>(options.trials);
    return {f, std::sqrt(f * (1.0 - f) / static_cast<double>(options.trials))};
}

std::optional<std::int64_t> tail_decreasing_from(const StopCurve &curve) {
    const auto &g = curve.grid;
    if (g.size() < 2) return std::nullopt;
    const auto tail = [&](std::size_t i) { return static_cast<double>(g[i].n) * (1.0 - g[i].p_stop); };
    std::size_t start = g.size() - 1;
    while (start > 0 && tail(start - 1) > tail(start)) --start;
    if (start == g.size() - 1) return std::nullopt;
    return g[start].n;
}

}  // namespace eyewit
