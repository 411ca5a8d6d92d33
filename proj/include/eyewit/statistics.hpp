#pragma once

// Certification statistics for the two-eye autocorrelation experiment.
//
// Each run yields one of three outcomes: a coincidence (both observers see
// light), a single only, or nothing. After N runs the pair (Ns, Nc) of
// singles (coincidences included) and coincidences is multinomial. The
// estimator lives in the plane (x, y), a linear image of (fs^2, fc) chosen so
// the quantum distribution has uncorrelated, equal-variance axes; the
// classical boundary pc = ps^2 is the line y' = 0 after a rotation by phi.

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace eyewit {

struct CellProbabilities {
    double ps = 0.0;
    double pc = 0.0;

    void validate() const;
    static CellProbabilities coherent(double ps) { return {ps, ps * ps}; }
    friend bool operator==(const CellProbabilities &, const CellProbabilities &) = default;
};

struct TransformCoefficients {
    double b = 0.0;
    double c = 0.0;
    double d = -1.0;
    double phi = 0.0;
};

struct PlanePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Resource ceilings shared by the windowed summations and the run-count loop.
struct ResourceLimits {
    /// Largest number of Ns values a single windowed sum may visit.
    std::int64_t max_window = 20'000'000;
    /// Largest run count N the stopping curve may reach.
    std::int64_t max_runs = 50'000'000;
    int max_fock_cutoff = 1 << 16;
};

struct CertificationPlan {
    CellProbabilities cell_q;
    TransformCoefficients coeffs;
    double a = 40.0;
    double ps_cl = 0.0;
    /// Rotated image (x'0, y'0) of the projected coherent cell.
    PlanePoint center;
    double epsilon = 0.01;
    /// Critical values on the coarse grid, sorted by N.
    std::vector<std::pair<std::int64_t, double>> chi0_by_n;

    CellProbabilities classical_cell() const { return CellProbabilities::coherent(ps_cl); }
    /// (fs^2, fc) -> (x, y).
    PlanePoint to_plane(double fs2, double fc) const;
    /// (x, y) -> (x', y').
    PlanePoint rotate(PlanePoint p) const;
    /// Estimator evaluated at frequencies (fs^2, fc).
    double chi_at(double fs2, double fc) const;
    /// chi0 interpolated linearly in N from chi0_by_n; +inf/-inf entries are
    /// held piecewise constant.
    double chi0_at(std::int64_t n) const;
};

double multinomial_log_pmf(std::int64_t ns, std::int64_t nc, std::int64_t n, const CellProbabilities &cell);

TransformCoefficients transform_coefficients(const CellProbabilities &cell_q);

/// Single probability of the coherent cell closest to the quantum cell in the
/// (x, y) plane.
double classical_projection(const CellProbabilities &cell_q, const TransformCoefficients &coeffs);

CertificationPlan make_plan(const CellProbabilities &cell_q, double a, double epsilon);

double estimator_chi(std::int64_t ns, std::int64_t nc, std::int64_t n, const CertificationPlan &plan);

/// P(chi <= chi0) after n runs when each run follows `cell`, by exact
/// summation over the 12-sigma window in Ns. For each Ns the acceptance set
/// in Nc is an interval, whose conditional Binomial(Ns, pc/ps) mass is
/// evaluated exactly.
double acceptance_probability(const CertificationPlan &plan, const CellProbabilities &cell, std::int64_t n,
                              double chi0, const ResourceLimits &limits = {});

/// Reference double sum over every (Ns, Nc) in the window with the
/// multinomial pmf; quadratic cost, used to cross-check the fast path.
double acceptance_probability_bruteforce(const CertificationPlan &plan, const CellProbabilities &cell,
                                         std::int64_t n, double chi0);

double p_stop(std::int64_t n, double chi0, const CertificationPlan &plan, const ResourceLimits &limits = {});

struct ClassicalScan {
    int ps_points = 400;
    double ps_min = 1e-4;
    double ps_max = 1.0 - 1e-4;
    int pc_points = 100;
    /// Also evaluate the projected coherent cell itself.
    bool include_projected = true;

    void validate() const;
    ClassicalScan refined() const { return {2 * ps_points, ps_min, ps_max, 2 * pc_points, include_projected}; }
};

enum class ClassicalStrategy {
    /// Worst case taken at the projected coherent cell only.
    projected,
    /// Worst case over the projected cell and the scan grid.
    scan,
};

struct PValueResult {
    double pvalue = 0.0;
    CellProbabilities argmax;
    /// Argmax is the projected coherent cell or within one grid step of it.
    bool argmax_is_projected = false;
    std::size_t cells_evaluated = 0;
    std::size_t cells_total = 0;
};

/// Grid cells of the scan: ps log-spaced, pc linear in [ps^2, ps].
std::vector<CellProbabilities> classical_scan_cells(const ClassicalScan &scan);

/// Worst-case classical probability of chi <= chi0 over the scan. When
/// `surface` is given it receives the probability of every grid cell in the
/// order of classical_scan_cells (cells that cannot reach chi0 report 0).
PValueResult classical_pvalue(double chi0, std::int64_t n, const CertificationPlan &plan,
                              const ClassicalScan &scan = {}, const ResourceLimits &limits = {},
                              std::vector<double> *surface = nullptr);

struct CriticalOptions {
    ClassicalStrategy strategy = ClassicalStrategy::scan;
    ClassicalScan scan{};
    /// Stop once the worst-case p-value lies in [eps (1 - rel_tol), eps].
    double rel_tol = 1e-3;
    int max_iterations = 200;
};

/// Largest chi0 whose worst-case classical p-value does not exceed epsilon.
double critical_chi0(double epsilon, std::int64_t n, const CertificationPlan &plan,
                     const CriticalOptions &options = {}, const ResourceLimits &limits = {});

struct StopPoint {
    std::int64_t n = 0;
    double chi0 = 0.0;
    double p_stop = 0.0;
};

struct StopCurve {
    std::vector<StopPoint> grid;
    std::int64_t coarse_n = 0;
    double expected_runs = 0.0;
    /// Contribution still missing when the sum was truncated, assuming the
    /// remaining stopping mass lands on the next grid point.
    double remainder = 0.0;
    bool converged = false;
};

struct ExpectedRunsOptions {
    CriticalOptions critical{};
    /// Terminate once 1 - P_stop falls below this value.
    double stop_tail = 1e-4;
    /// Keep going to at least this N (for plotting fixed ranges).
    std::int64_t min_n = 0;
};

/// Coarse-grained estimate of the mean number of runs needed to reject the
/// classical hypothesis at p-value epsilon. Fills plan.chi0_by_n.
StopCurve expected_runs(double epsilon, std::int64_t coarse_n, CertificationPlan &plan,
                        const ExpectedRunsOptions &options = {}, const ResourceLimits &limits = {});

/// Coarse-grained mean from an arbitrary curve of cumulative stop
/// probabilities sampled at n, 2n, 3n, ...
double coarse_grained_mean(std::int64_t coarse_n, const std::vector<double> &p_stop_curve);

}  // namespace eyewit
