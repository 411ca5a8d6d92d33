#include "eyewit/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "eyewit/error.hpp"
#include "eyewit/numeric.hpp"

namespace eyewit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCellTol = 1e-12;
// Rows of the Ns sum below e^-60 are dropped; the window holds ~1e5 rows at most.
constexpr double kNegligibleLogWeight = -60.0;
// Window half-width solves the Bernstein bound exp(-t^2 / (2 (s^2 + t/3))) = 1e-30;
// this is ~12 standard deviations for large counts and widens for small ones.
constexpr double kWindowLog = 2.0 * 69.07755278982137;

double window_halfwidth(double variance, double log_bound = kWindowLog) {
    const double k3 = log_bound / 3.0;
    return 0.5 * (k3 + std::sqrt(k3 * k3 + 4.0 * log_bound * variance));
}

struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

Window binomial_window(std::int64_t n, double p, double log_bound = kWindowLog) {
    const double mean = static_cast<double>(n) * p;
    const double half = window_halfwidth(mean * (1.0 - p), log_bound);
    Window w;
    w.lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mean - half)));
    w.hi = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::ceil(mean + half)));
    return w;
}

// Lower CDF P(X <= k) of X ~ Binomial(n, q) along a path of (n, k) that
// moves by small steps. Steps use the exact recurrences
//   F_{n+1}(k) = F_n(k) - q pmf_n(k),   F_n(k + 1) = F_n(k) + pmf_n(k + 1)
// on whichever tail is smaller at the last anchor; anchors are exact
// incomplete-beta evaluations, refreshed often enough to keep the
// accumulated rounding near 1e-14.
class BinomialCdfTracker {
  public:
    explicit BinomialCdfTracker(double q) : q_(q), lq_(std::log(q)), l1q_(std::log1p(-q)) {}

    double lower(std::int64_t n, std::int64_t k) {
        if (k < 0) return 0.0;
        if (k >= n) return 1.0;
        if (!valid_ || n < n_ || n - n_ > kMaxJump || std::abs(k - k_) > kMaxJump || steps_ > kMaxSteps) {
            anchor(n, k);
        } else {
            while (n_ < n) step_n();
            while (k_ < k) step_k_up();
            while (k_ > k) step_k_down();
        }
        const double f = upper_ ? 1.0 - tail_ : tail_;
        return std::clamp(f, 0.0, 1.0);
    }

  private:
    static constexpr std::int64_t kMaxJump = 64;
    static constexpr int kMaxSteps = 256;

    double pmf(std::int64_t n, std::int64_t k) const {
        if (k < 0 || k > n) return 0.0;
        return std::exp(numeric::log_choose(n, k) + static_cast<double>(k) * lq_ + static_cast<double>(n - k) * l1q_);
    }

    void anchor(std::int64_t n, std::int64_t k) {
        n_ = n;
        k_ = k;
        const auto nd = static_cast<double>(n);
        const auto kd = static_cast<double>(k);
        upper_ = kd >= nd * q_;
        tail_ = upper_ ? boost::math::ibeta(kd + 1.0, nd - kd, q_) : boost::math::ibetac(kd + 1.0, nd - kd, q_);
        steps_ = 0;
        valid_ = true;
    }

    void step_n() {
        const double d = q_ * pmf(n_, k_);
        tail_ += upper_ ? d : -d;
        ++n_;
        ++steps_;
    }

    void step_k_up() {
        const double d = pmf(n_, k_ + 1);
        tail_ += upper_ ? -d : d;
        ++k_;
        ++steps_;
    }

    void step_k_down() {
        const double d = pmf(n_, k_);
        tail_ += upper_ ? d : -d;
        --k_;
        ++steps_;
    }

    double q_;
    double lq_;
    double l1q_;
    bool valid_ = false;
    bool upper_ = false;
    std::int64_t n_ = 0;
    std::int64_t k_ = 0;
    double tail_ = 0.0;
    int steps_ = 0;
};

// Linear maps from (u, v) = (fs^2, fc) to the rotated coordinates.
struct RotatedMap {
    double ux, vx;  // x' = ux u + vx v
    double uy, vy;  // y' = uy u + vy v
};

RotatedMap rotated_map(const TransformCoefficients &k) {
    const double A = std::sqrt(k.c / k.b);
    const double B = k.d / std::sqrt(k.c * k.b);
    const double C = std::sqrt(k.b / k.c);
    const double cp = std::cos(k.phi);
    const double sp = std::sin(k.phi);
    return {cp * A, cp * B + sp * C, -sp * A, cp * C - sp * B};
}

// Minimum of chi over the rectangle [u0, u1] x [v0, v1]. chi is a convex
// quadratic with a rank-one Hessian, so the minimum sits on an edge.
double rectangle_min_chi(const CertificationPlan &plan, const RotatedMap &m, double u0, double u1, double v0,
                         double v1) {
    const double a = plan.a;
    const auto chi = [&](double u, double v) {
        const double xp = m.ux * u + m.vx * v - plan.center.x;
        const double yp = m.uy * u + m.vy * v - plan.center.y;
        return yp + a * xp * xp;
    };
    // argmin of chi along v with u fixed
    const auto best_v = [&](double u) {
        if (a * m.vx * m.vx <= 0.0) return m.vy > 0.0 ? v0 : v1;
        const double v = -(m.vy + 2.0 * a * m.vx * (m.ux * u - plan.center.x)) / (2.0 * a * m.vx * m.vx);
        return std::clamp(v, v0, v1);
    };
    const auto best_u = [&](double v) {
        if (a * m.ux * m.ux <= 0.0) return m.uy > 0.0 ? u0 : u1;
        const double u = -(m.uy + 2.0 * a * m.ux * (m.vx * v - plan.center.x)) / (2.0 * a * m.ux * m.ux);
        return std::clamp(u, u0, u1);
    };
    double best = chi(u0, best_v(u0));
    best = std::min(best, chi(u1, best_v(u1)));
    best = std::min(best, chi(best_u(v0), v0));
    best = std::min(best, chi(best_u(v1), v1));
    return best;
}

// Minimum of chi over a box holding all but exp(-log_bound / 2) of each
// marginal tail (Bernstein bound, both sides).
double rectangle_min_for_cell(const CertificationPlan &plan, const RotatedMap &m, const CellProbabilities &cell,
                              std::int64_t n, double log_bound = kWindowLog) {
    const Window ws = binomial_window(n, cell.ps, log_bound);
    const Window wc = binomial_window(n, cell.pc, log_bound);
    const auto nd = static_cast<double>(n);
    const double s0 = static_cast<double>(ws.lo) / nd;
    const double s1 = static_cast<double>(ws.hi) / nd;
    return rectangle_min_chi(plan, m, s0 * s0, s1 * s1, static_cast<double>(wc.lo) / nd,
                             static_cast<double>(wc.hi) / nd);
}

std::vector<CellProbabilities> grid_cells(const ClassicalScan &scan) {
    std::vector<CellProbabilities> cells;
    cells.reserve(static_cast<std::size_t>(scan.ps_points) * static_cast<std::size_t>(scan.pc_points));
    const double l0 = std::log(scan.ps_min);
    const double l1 = std::log(scan.ps_max);
    for (int i = 0; i < scan.ps_points; ++i) {
        const double ps = scan.ps_points == 1 ? scan.ps_min : std::exp(l0 + (l1 - l0) * i / (scan.ps_points - 1));
        const double lo = ps * ps;
        for (int j = 0; j < scan.pc_points; ++j) {
            const double pc = scan.pc_points == 1 ? lo : lo + (ps - lo) * j / (scan.pc_points - 1);
            cells.push_back({ps, pc});
        }
    }
    return cells;
}

double normal_quantile(double p) {
    static const boost::math::normal std_normal;
    return boost::math::quantile(std_normal, std::clamp(p, 1e-300, 1.0 - 1e-16));
}

// Largest x with f(x) <= target for a nondecreasing step function f, stopping
// once f(x) is within target * rel_tol below the target.
template <typename F>
double largest_below(F &&f, double target, double scale, double hi_hint, const CriticalOptions &opts) {
    double lo;
    double hi;
    double flo;
    double fhi;
    int guard = 0;
    if (std::isfinite(hi_hint)) {
        hi = hi_hint;
        fhi = f(hi);
        if (fhi <= target) return hi;
    } else {
        hi = 0.0;
        fhi = f(hi);
    }
    if (fhi <= target) {
        lo = hi;
        flo = fhi;
        double step = scale;
        do {
            require(++guard < 400, ErrorCode::infeasible, "could not bracket the critical value from above");
            hi = lo + step;
            fhi = f(hi);
            if (fhi <= target) {
                lo = hi;
                flo = fhi;
            }
            step *= 2.0;
        } while (fhi <= target);
    } else {
        double step = scale;
        lo = hi - step;
        flo = f(lo);
        while (flo > target) {
            require(++guard < 400, ErrorCode::infeasible,
                    "no critical value reaches the requested p-value");
            hi = lo;
            fhi = flo;
            step *= 2.0;
            lo = hi - step;
            flo = f(lo);
        }
    }

    const double zt = normal_quantile(target);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (flo >= target * (1.0 - opts.rel_tol)) return lo;
        const double width = hi - lo;
        if (width <= 1e-14 * std::max({std::abs(lo), std::abs(hi), scale})) return lo;
        double x;
        if (it % 4 == 3) {
            x = lo + 0.5 * width;
        } else {
            const double zl = normal_quantile(flo);
            const double zh = normal_quantile(fhi);
            const double frac = zh > zl ? (zt - zl) / (zh - zl) : 0.5;
            x = lo + width * std::clamp(frac, 0.02, 0.98);
        }
        const double fx = f(x);
        if (fx <= target) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    fail(ErrorCode::non_convergence, "critical value search did not converge");
}

}  // namespace

void CellProbabilities::validate() const {
    require(std::isfinite(ps) && std::isfinite(pc), ErrorCode::invalid_argument, "non-finite cell probability");
    require(pc >= -kCellTol && pc <= ps + kCellTol && ps <= 1.0 + kCellTol, ErrorCode::invalid_argument,
            "cell probabilities must satisfy 0 <= pc <= ps <= 1");
    require(2.0 * ps - pc <= 1.0 + kCellTol, ErrorCode::invalid_argument,
            "cell probabilities must satisfy 2 ps - pc <= 1");
}

PlanePoint CertificationPlan::to_plane(double fs2, double fc) const {
    const auto &k = coeffs;
    return {std::sqrt(k.c / k.b) * fs2 + k.d / std::sqrt(k.c * k.b) * fc, std::sqrt(k.b / k.c) * fc};
}

PlanePoint CertificationPlan::rotate(PlanePoint p) const {
    const double cp = std::cos(coeffs.phi);
    const double sp = std::sin(coeffs.phi);
    return {cp * p.x + sp * p.y, cp * p.y - sp * p.x};
}

double CertificationPlan::chi_at(double fs2, double fc) const {
    const PlanePoint r = rotate(to_plane(fs2, fc));
    const double dx = r.x - center.x;
    return r.y - center.y + a * dx * dx;
}

double CertificationPlan::chi0_at(std::int64_t n) const {
    require(!chi0_by_n.empty(), ErrorCode::invalid_argument, "plan has no critical-value table");
    if (n <= chi0_by_n.front().first) return chi0_by_n.front().second;
    if (n >= chi0_by_n.back().first) return chi0_by_n.back().second;
    const auto it = std::lower_bound(chi0_by_n.begin(), chi0_by_n.end(), n,
                                     [](const auto &e, std::int64_t v) { return e.first < v; });
    if (it->first == n) return it->second;
    const auto prev = std::prev(it);
    if (!std::isfinite(prev->second) || !std::isfinite(it->second)) return prev->second;
    const double w = static_cast<double>(n - prev->first) / static_cast<double>(it->first - prev->first);
    return prev->second + w * (it->second - prev->second);
}

double multinomial_log_pmf(std::int64_t ns, std::int64_t nc, std::int64_t n, const CellProbabilities &cell) {
    require(0 <= nc && nc <= ns && ns <= n, ErrorCode::domain_error, "counts must satisfy 0 <= Nc <= Ns <= N");
    cell.validate();
    using numeric::log_factorial;
    using numeric::xlogy;
    const double single_only = std::max(0.0, cell.ps - cell.pc);
    return log_factorial(n) - log_factorial(nc) - log_factorial(ns - nc) - log_factorial(n - ns) +
           xlogy(static_cast<double>(nc), cell.pc) + xlogy(static_cast<double>(ns - nc), single_only) +
           xlogy(static_cast<double>(n - ns), 1.0 - cell.ps);
}

TransformCoefficients transform_coefficients(const CellProbabilities &cell_q) {
    const double ps = cell_q.ps;
    const double pc = cell_q.pc;
    require(pc > 0.0 && ps > 0.0 && ps < 1.0, ErrorCode::degenerate_cell,
            "transform needs 0 < pc and 0 < ps < 1");
    require(pc < ps, ErrorCode::degenerate_cell, "pc = ps leaves the rotation undefined (b = 0)");
    const double b2 = (1.0 - pc) * ps / ((1.0 - ps) * pc) - 1.0;
    require(b2 > 0.0, ErrorCode::degenerate_cell, "b vanishes for this cell");
    TransformCoefficients k;
    k.b = std::sqrt(b2);
    k.c = (1.0 - pc) / (2.0 * ps * (1.0 - ps));
    k.d = -1.0;
    k.phi = std::acos(std::clamp((k.c + k.d) / std::hypot(k.b, k.c + k.d), -1.0, 1.0));
    return k;
}

double classical_projection(const CellProbabilities &cell_q, const TransformCoefficients &k) {
    const double cd = k.c + k.d;
    const double denom = k.b * k.b + cd * cd;
    require(k.b > 0.0 && denom > 0.0, ErrorCode::degenerate_cell, "degenerate transform coefficients");
    const double radicand = (k.c * cd * cell_q.ps * cell_q.ps + (k.d * cd + k.b * k.b) * cell_q.pc) / denom;
    require(radicand >= 0.0, ErrorCode::negative_radicand,
            "projection radicand " + std::to_string(radicand) + " is negative");
    return std::sqrt(radicand);
}

CertificationPlan make_plan(const CellProbabilities &cell_q, double a, double epsilon) {
    cell_q.validate();
    require(std::isfinite(a) && a >= 0.0, ErrorCode::invalid_argument, "parabola steepness a must be >= 0");
    require(epsilon > 0.0 && epsilon <= 0.5, ErrorCode::invalid_argument, "epsilon must lie in (0, 0.5]");
    CertificationPlan plan;
    plan.cell_q = cell_q;
    plan.coeffs = transform_coefficients(cell_q);
    plan.a = a;
    plan.epsilon = epsilon;
    plan.ps_cl = classical_projection(cell_q, plan.coeffs);
    require(plan.ps_cl <= 1.0, ErrorCode::invalid_argument, "projected classical single probability exceeds 1");
    const double w = plan.ps_cl * plan.ps_cl;
    plan.center = plan.rotate(plan.to_plane(w, w));
    return plan;
}

double estimator_chi(std::int64_t ns, std::int64_t nc, std::int64_t n, const CertificationPlan &plan) {
    require(n > 0 && 0 <= nc && nc <= ns && ns <= n, ErrorCode::domain_error,
            "counts must satisfy 0 <= Nc <= Ns <= N, N > 0");
    const double fs = static_cast<double>(ns) / static_cast<double>(n);
    return plan.chi_at(fs * fs, static_cast<double>(nc) / static_cast<double>(n));
}

double acceptance_probability(const CertificationPlan &plan, const CellProbabilities &cell, std::int64_t n,
                              double chi0, const ResourceLimits &limits) {
    cell.validate();
    require(n > 0, ErrorCode::invalid_argument, "number of runs must be positive");
    require(!std::isnan(chi0), ErrorCode::invalid_argument, "chi0 is NaN");
    if (chi0 == kInf) return 1.0;
    if (chi0 == -kInf) return 0.0;

    const Window ws = binomial_window(n, cell.ps);
    require(ws.hi - ws.lo + 1 <= limits.max_window, ErrorCode::window_overflow,
            "summation window of " + std::to_string(ws.hi - ws.lo + 1) + " exceeds the resource limit");

    const RotatedMap m = rotated_map(plan.coeffs);
    const double a = plan.a;
    const auto nd = static_cast<double>(n);
    const double q = cell.ps > 0.0 ? std::clamp(cell.pc / cell.ps, 0.0, 1.0) : 0.0;
    const double lfn = numeric::log_factorial(n);
    const double lps = cell.ps > 0.0 ? std::log(cell.ps) : 0.0;
    const double lqs = cell.ps < 1.0 ? std::log1p(-cell.ps) : 0.0;
    const double qa = a * m.vx * m.vx;
    BinomialCdfTracker lower_end(q);
    BinomialCdfTracker upper_end(q);

    double total = 0.0;
    for (std::int64_t ns = ws.lo; ns <= ws.hi; ++ns) {
        const double lw = lfn - numeric::log_factorial(ns) - numeric::log_factorial(n - ns) +
                          (ns > 0 ? static_cast<double>(ns) * lps : 0.0) +
                          (n - ns > 0 ? static_cast<double>(n - ns) * lqs : 0.0);
        if (lw < kNegligibleLogWeight) continue;
        const double weight = std::exp(lw);
        const double fs = static_cast<double>(ns) / nd;
        const double u = fs * fs;
        const auto chi = [&](std::int64_t nc) { return plan.chi_at(u, static_cast<double>(nc) / nd); };

        // chi as a quadratic in v = Nc / N: qa v^2 + qb v + qc <= 0
        const double x0 = m.ux * u - plan.center.x;
        const double y0 = m.uy * u - plan.center.y;
        const double qb = 2.0 * a * m.vx * x0 + m.vy;
        const double qc = a * x0 * x0 + y0 - chi0;
        double vlo;
        double vhi;
        if (qa > 0.0) {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc < 0.0) continue;
            const double sq = std::sqrt(disc);
            // numerically stable roots
            const double t = -0.5 * (qb + std::copysign(sq, qb));
            double r1 = t / qa;
            double r2 = t != 0.0 ? qc / t : r1;
            if (r1 > r2) std::swap(r1, r2);
            vlo = r1;
            vhi = r2;
        } else if (qb > 0.0) {
            vlo = -kInf;
            vhi = -qc / qb;
        } else if (qb < 0.0) {
            vlo = -qc / qb;
            vhi = kInf;
        } else {
            if (qc > 0.0) continue;
            vlo = -kInf;
            vhi = kInf;
        }
        const double fl = std::max(vlo * nd, -1.0);
        const double fh = std::min(vhi * nd, nd + 1.0);
        if (fl > fh) continue;
        auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(fl)));
        auto hi = std::min<std::int64_t>(ns, static_cast<std::int64_t>(std::floor(fh)));
        // snap the ends to the exact estimator
        while (lo > 0 && chi(lo - 1) <= chi0) --lo;
        while (lo <= hi && chi(lo) > chi0) ++lo;
        while (hi < ns && chi(hi + 1) <= chi0) ++hi;
        while (hi >= lo && chi(hi) > chi0) --hi;
        if (lo > hi) continue;


        double mass;
        if (q <= 0.0) {
            mass = lo == 0 ? 1.0 : 0.0;
        } else if (q >= 1.0) {
            mass = hi == ns ? 1.0 : 0.0;
        } else {
            // ends further than 15 sd from the conditional mean saturate
            const double cmean = static_cast<double>(ns) * q;
            const double cvar = cmean * (1.0 - q);
            const double half = cvar >= 25.0 ? 15.0 * std::sqrt(cvar) : kInf;
            if (static_cast<double>(hi) < cmean - half || static_cast<double>(lo) > cmean + half) continue;
            const double upper = static_cast<double>(hi) >= cmean + half ? 1.0 : upper_end.lower(ns, hi);
            const double lower = static_cast<double>(lo) <= cmean - half ? 0.0 : lower_end.lower(ns, lo - 1);
            mass = std::max(0.0, upper - lower);
        }
        total += weight * mass;
    }
    return std::clamp(total, 0.0, 1.0);
}

double acceptance_probability_bruteforce(const CertificationPlan &plan, const CellProbabilities &cell,
                                         std::int64_t n, double chi0) {
    double total = 0.0;
    for (std::int64_t ns = 0; ns <= n; ++ns) {
        for (std::int64_t nc = 0; nc <= ns; ++nc) {
            if (estimator_chi(ns, nc, n, plan) > chi0) continue;
            const double lp = multinomial_log_pmf(ns, nc, n, cell);
            if (lp == numeric::kNegInf) continue;
            total += std::exp(lp);
        }
    }
    return total;
}

double p_stop(std::int64_t n, double chi0, const CertificationPlan &plan, const ResourceLimits &limits) {
    return acceptance_probability(plan, plan.cell_q, n, chi0, limits);
}

void ClassicalScan::validate() const {
    require(ps_points >= 1 && pc_points >= 1, ErrorCode::invalid_argument, "scan needs at least one point");
    require(ps_min > 0.0 && ps_max < 1.0 && ps_min <= ps_max, ErrorCode::invalid_argument,
            "scan ps range must lie inside (0, 1)");
}

std::vector<CellProbabilities> classical_scan_cells(const ClassicalScan &scan) {
    scan.validate();
    return grid_cells(scan);
}

PValueResult classical_pvalue(double chi0, std::int64_t n, const CertificationPlan &plan, const ClassicalScan &scan,
                              const ResourceLimits &limits, std::vector<double> *surface) {
    scan.validate();
    const auto cells = grid_cells(scan);
    const RotatedMap m = rotated_map(plan.coeffs);
    const CellProbabilities projected = plan.classical_cell();

    PValueResult out;
    out.cells_total = cells.size() + (scan.include_projected ? 1 : 0);
    out.argmax = projected;
    out.pvalue = -1.0;
    bool argmax_projected_exact = false;

    const auto consider = [&](const CellProbabilities &cell, bool is_projected) {
        if (std::isfinite(chi0) && rectangle_min_for_cell(plan, m, cell, n) > chi0) {
            if (out.pvalue < 0.0) {
                out.pvalue = 0.0;
                out.argmax = cell;
                argmax_projected_exact = is_projected;
            }
            return 0.0;
        }
        ++out.cells_evaluated;
        const double p = acceptance_probability(plan, cell, n, chi0, limits);
        if (p > out.pvalue) {
            out.pvalue = p;
            out.argmax = cell;
            argmax_projected_exact = is_projected;
        }
        return p;
    };
    if (scan.include_projected) consider(projected, true);
    if (surface != nullptr) surface->assign(cells.size(), 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double p = consider(cells[i], false);
        if (surface != nullptr) (*surface)[i] = p;
    }
    out.pvalue = std::max(out.pvalue, 0.0);

    if (argmax_projected_exact) {
        out.argmax_is_projected = true;
    } else {
        // one grid step in ps (log spacing) and in pc (linear spacing at that ps)
        const double ratio = scan.ps_points > 1 ? std::exp(std::log(scan.ps_max / scan.ps_min) / (scan.ps_points - 1))
                                                : 1.0;
        const double ps = out.argmax.ps;
        const double pc_step = scan.pc_points > 1 ? (ps - ps * ps) / (scan.pc_points - 1) : 0.0;
        out.argmax_is_projected = projected.ps >= ps / ratio - 1e-15 && projected.ps <= ps * ratio + 1e-15 &&
                                  std::abs(projected.pc - out.argmax.pc) <= pc_step + std::abs(projected.pc - ps * ps);
    }
    return out;
}

double critical_chi0(double epsilon, std::int64_t n, const CertificationPlan &plan, const CriticalOptions &options,
                     const ResourceLimits &limits) {
    require(epsilon > 0.0 && epsilon <= 0.5, ErrorCode::invalid_argument, "epsilon must lie in (0, 0.5]");
    require(n > 0, ErrorCode::invalid_argument, "number of runs must be positive");
    const CellProbabilities projected = plan.classical_cell();
    const double pq = plan.cell_q.pc;
    const double scale =
        std::sqrt(plan.coeffs.b * pq * (1.0 - pq) / (plan.coeffs.c * static_cast<double>(n)));

    const auto f_projected = [&](double chi0) { return acceptance_probability(plan, projected, n, chi0, limits); };
    const double chi_projected = largest_below(f_projected, epsilon, scale, kInf, options);
    if (options.strategy == ClassicalStrategy::projected) return chi_projected;

    options.scan.validate();
    const RotatedMap m = rotated_map(plan.coeffs);
    // The answer lies at or below chi_projected and every acceptance
    // probability is nondecreasing in chi0, so a cell that stays within
    // epsilon at chi_projected can never bind.
    // Outside a box that keeps all but epsilon / 100 of the mass the cell
    // cannot reach chi_projected, so such cells are within epsilon as well.
    const double log_bound = 2.0 * std::log(400.0 / epsilon);
    std::vector<CellProbabilities> active;
    for (const auto &cell : grid_cells(options.scan)) {
        if (rectangle_min_for_cell(plan, m, cell, n, log_bound) > chi_projected) continue;
        if (acceptance_probability(plan, cell, n, chi_projected, limits) > epsilon) active.push_back(cell);
    }
    if (active.empty()) return chi_projected;

    const auto f_worst = [&](double chi0) {
        double worst = acceptance_probability(plan, projected, n, chi0, limits);
        for (const auto &cell : active) worst = std::max(worst, acceptance_probability(plan, cell, n, chi0, limits));
        return worst;
    };
    return largest_below(f_worst, epsilon, scale, chi_projected, options);
}

double coarse_grained_mean(std::int64_t coarse_n, const std::vector<double> &p_stop_curve) {
    require(coarse_n >= 1, ErrorCode::invalid_argument, "coarse_n must be >= 1");
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < p_stop_curve.size(); ++j) {
        const double mid = static_cast<double>(coarse_n) * (2.0 * static_cast<double>(j) + 1.0) / 2.0;
        total += mid * (p_stop_curve[j] - prev);
        prev = p_stop_curve[j];
    }
    return total;
}

StopCurve expected_runs(double epsilon, std::int64_t coarse_n, CertificationPlan &plan,
                        const ExpectedRunsOptions &options, const ResourceLimits &limits) {
    require(coarse_n >= 1, ErrorCode::invalid_argument, "coarse_n must be >= 1");
    require(epsilon > 0.0 && epsilon <= 0.5, ErrorCode::invalid_argument, "epsilon must lie in (0, 0.5]");
    plan.epsilon = epsilon;
    plan.chi0_by_n.clear();

    StopCurve curve;
    curve.coarse_n = coarse_n;
    std::vector<double> values;
    for (std::int64_t j = 1;; ++j) {
        const std::int64_t n = coarse_n * j;
        if (n > limits.max_runs) {
            fail(ErrorCode::non_convergence, "stopping probability did not approach 1 within " +
                                                 std::to_string(limits.max_runs) + " runs");
        }
        const double chi0 = critical_chi0(epsilon, n, plan, options.critical, limits);
        const double ps = p_stop(n, chi0, plan, limits);
        curve.grid.push_back({n, chi0, ps});
        plan.chi0_by_n.emplace_back(n, chi0);
        values.push_back(ps);
        if (1.0 - ps < options.stop_tail && n >= options.min_n) break;
    }
    curve.expected_runs = coarse_grained_mean(coarse_n, values);
    const double last_n = static_cast<double>(curve.grid.back().n);
    curve.remainder = (1.0 - values.back()) * (last_n + 0.5 * static_cast<double>(coarse_n));
    curve.converged = true;
    return curve;
}

}  // namespace eyewit
