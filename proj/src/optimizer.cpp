#include "eyewit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eyewit/error.hpp"

namespace eyewit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Evaluator {
  public:
    Evaluator(const Objective &f, const std::vector<ParameterBound> &bounds, int budget, OptimizeResult &out)
        : f_(f), bounds_(bounds), budget_(budget), out_(out) {}

    bool exhausted() const { return static_cast<int>(out_.trace.size()) >= budget_; }

    std::vector<double> to_box(std::span<const double> y) const {
        std::vector<double> x(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double yi = std::clamp(y[i], 0.0, 1.0);
            x[i] = bounds_[i].lo + yi * (bounds_[i].hi - bounds_[i].lo);
        }
        return x;
    }

    double operator()(std::span<const double> y, const char *stage) {
        TraceEntry e;
        e.stage = stage;
        e.x = to_box(y);
        try {
            e.value = f_(e.x);
            if (std::isnan(e.value)) {
                e.ok = false;
                e.error = "objective returned NaN";
                e.value = kInf;
            }
        } catch (const Error &err) {
            e.ok = false;
            e.error = err.what();
            e.value = kInf;
        }
        out_.trace.push_back(e);
        if (e.value < out_.value) {
            out_.value = e.value;
            out_.best = e.x;
        }
        return e.value;
    }

  private:
    const Objective &f_;
    const std::vector<ParameterBound> &bounds_;
    int budget_;
    OptimizeResult &out_;
};

void nelder_mead(Evaluator &eval, std::vector<double> start, const std::vector<ParameterBound> &bounds,
                 double f_start, const OptimizeOptions &options, OptimizeResult &out) {
    const std::size_t d = start.size();
    std::vector<std::vector<double>> pts{start};
    std::vector<double> vals{f_start};
    for (std::size_t i = 0; i < d; ++i) {
        if (eval.exhausted()) {
            out.budget_exhausted = true;
            return;
        }
        const double h = bounds[i].grid_points > 1 ? 1.0 / (bounds[i].grid_points - 1) : 0.1;
        auto p = start;
        p[i] = p[i] + h <= 1.0 ? p[i] + h : p[i] - h;
        vals.push_back(eval(p, "simplex"));
        pts.push_back(std::move(p));
    }

    const auto clamp_box = [](std::vector<double> p) {
        for (auto &v : p) v = std::clamp(v, 0.0, 1.0);
        return p;
    };
    const auto combine = [&](const std::vector<double> &c, const std::vector<double> &w, double t) {
        std::vector<double> p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = c[i] + t * (w[i] - c[i]);
        return clamp_box(std::move(p));
    };

    std::vector<std::size_t> order(d + 1);
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[d - 1];

        double size = 0.0;
        for (std::size_t k = 0; k <= d; ++k) {
            for (std::size_t i = 0; i < d; ++i) size = std::max(size, std::abs(pts[k][i] - pts[best][i]));
        }
        const double spread = vals[worst] - vals[best];
        if (size <= options.xtol) return;
        if (std::isfinite(spread) && spread <= options.ftol * std::max(std::abs(vals[best]), 1e-300)) return;
        if (eval.exhausted()) {
            out.budget_exhausted = true;
            return;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < d; ++i) centroid[i] += pts[k][i] / static_cast<double>(d);
        }
        auto reflected = combine(centroid, pts[worst], -1.0);
        const double fr = eval(reflected, "reflect");
        if (fr < vals[best]) {
            if (eval.exhausted()) {
                pts[worst] = std::move(reflected);
                vals[worst] = fr;
                continue;
            }
            auto expanded = combine(centroid, pts[worst], -2.0);
            const double fe = eval(expanded, "expand");
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                vals[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = std::move(reflected);
            vals[worst] = fr;
            continue;
        }
        if (eval.exhausted()) continue;
        const bool outside = fr < vals[worst];
        auto contracted = outside ? combine(centroid, reflected, 0.5) : combine(centroid, pts[worst], 0.5);
        const double fc = eval(contracted, "contract");
        if (fc < std::min(fr, vals[worst])) {
            pts[worst] = std::move(contracted);
            vals[worst] = fc;
            continue;
        }
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == best || eval.exhausted()) continue;
            pts[k] = combine(pts[best], pts[k], 0.5);
            vals[k] = eval(pts[k], "shrink");
        }
    }
}

double bound_value(std::span<const std::string> names, std::span<const double> values, const std::string &name,
                   double fallback) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    return fallback;
}

}  // namespace

OptimizeResult minimize(const Objective &f, const std::vector<ParameterBound> &bounds,
                        const OptimizeOptions &options) {
    require(!bounds.empty(), ErrorCode::invalid_argument, "no parameters to optimize");
    require(options.budget >= 1, ErrorCode::invalid_argument, "budget must be >= 1");
    for (const auto &b : bounds) {
        require(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo < b.hi, ErrorCode::invalid_argument,
                "bounds for '" + b.name + "' are empty");
        require(b.grid_points >= 1, ErrorCode::invalid_argument, "grid for '" + b.name + "' needs >= 1 point");
    }

    OptimizeResult out;
    out.value = kInf;
    for (const auto &b : bounds) out.names.push_back(b.name);
    Evaluator eval(f, bounds, options.budget, out);

    const std::size_t d = bounds.size();
    std::vector<int> idx(d, 0);
    std::vector<double> best_y;
    double best_f = kInf;
    bool done = false;
    while (!done) {
        if (eval.exhausted()) {
            out.budget_exhausted = true;
            break;
        }
        std::vector<double> y(d);
        for (std::size_t i = 0; i < d; ++i) {
            const int g = bounds[i].grid_points;
            y[i] = g > 1 ? static_cast<double>(idx[i]) / (g - 1) : 0.5;
        }
        const double v = eval(y, "grid");
        if (v < best_f) {
            best_f = v;
            best_y = y;
        }
        std::size_t k = d;
        while (k > 0) {
            --k;
            if (++idx[k] < bounds[k].grid_points) break;
            idx[k] = 0;
            if (k == 0) done = true;
        }
    }
    require(std::isfinite(best_f), ErrorCode::infeasible_region, "objective failed at every grid point");
    out.best_grid_value = best_f;
    if (!out.budget_exhausted) nelder_mead(eval, best_y, bounds, best_f, options, out);
    return out;
}

void OptimizationSpec::validate() const {
    require(epsilon > 0.0 && epsilon <= 0.5, ErrorCode::validation_error, "epsilon must lie in (0, 0.5]");
    require(fixed_n >= 1 && coarse_n >= 1, ErrorCode::validation_error, "run counts must be >= 1");
    require(!bounds.empty(), ErrorCode::validation_error, "optimizer needs at least one bounded parameter");
    require(max_runs >= 1, ErrorCode::validation_error, "optimizer max_runs must be >= 1");
    require(options.budget >= 1, ErrorCode::validation_error, "optimizer budget must be >= 1");
    for (const auto &b : bounds) {
        require(b.name == "alpha" || b.name == "beta" || b.name == "a" || b.name == "t",
                ErrorCode::validation_error, "unknown optimizer parameter '" + b.name + "'");
        require(b.lo < b.hi && b.grid_points >= 1, ErrorCode::validation_error,
                "bounds for '" + b.name + "' must satisfy lo < hi with >= 1 grid point");
    }
}

double chain_objective(const OptimizationSpec &spec, const ChainConfig &base, double base_a,
                       std::span<const std::string> names, std::span<const double> values,
                       const ResourceLimits &limits) {
    ChainConfig config = base;
    config.alpha = {bound_value(names, values, "alpha", std::abs(base.alpha)), 0.0};
    config.prep.beta = {bound_value(names, values, "beta", std::abs(base.prep.beta)), 0.0};
    config.prep.t = bound_value(names, values, "t", base.prep.t);
    const double a = bound_value(names, values, "a", base_a);

    const ChainResult chain = evaluate_chain(config);
    CertificationPlan plan = make_plan(chain.cell, a, spec.epsilon);
    CriticalOptions critical;
    critical.strategy = spec.strategy;
    critical.scan = spec.scan;
    critical.rel_tol = spec.critical_rel_tol;
    if (spec.objective == ObjectiveKind::p_stop) {
        const double chi0 = critical_chi0(spec.epsilon, spec.fixed_n, plan, critical, limits);
        return 1.0 - p_stop(spec.fixed_n, chi0, plan, limits);
    }
    ExpectedRunsOptions er;
    er.critical = critical;
    er.stop_tail = spec.stop_tail;
    return expected_runs(spec.epsilon, spec.coarse_n, plan, er, limits).expected_runs;
}

OptimizeResult optimize(const OptimizationSpec &spec, const ChainConfig &base, double base_a,
                        const ResourceLimits &limits) {
    spec.validate();
    std::vector<std::string> names;
    for (const auto &b : spec.bounds) names.push_back(b.name);
    ResourceLimits eval_limits = limits;
    eval_limits.max_runs = std::min(limits.max_runs, spec.max_runs);
    const Objective f = [&](std::span<const double> x) {
        return chain_objective(spec, base, base_a, names, x, eval_limits);
    };
    return minimize(f, spec.bounds, spec.options);
}

std::vector<ParameterBound> default_bounds() {
    return {{"alpha", 8.0, 14.0, 16}, {"beta", 0.03, 0.15, 16}, {"a", 5.0, 100.0, 8}};
}

}  // namespace eyewit
