#include "eyewit/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "eyewit/config.hpp"
#include "eyewit/csv.hpp"
#include "eyewit/error.hpp"
#include "eyewit/montecarlo.hpp"
#include "eyewit/optimizer.hpp"
#include "eyewit/pipeline.hpp"
#include "eyewit/statistics.hpp"
#include "eyewit/witness.hpp"

namespace eyewit {

namespace {

constexpr double kSecondsPerHour = 3600.0;

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    bool dump = false;

    double alpha_min = 0.1;
    double alpha_max = 15.0;
    int points = 200;
    std::string state = "ideal";

    std::optional<double> epsilon;
    std::optional<std::int64_t> coarse_n;
    std::optional<double> a;
    std::optional<double> alpha;
    std::vector<std::int64_t> at{350000};

    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;
    std::int64_t max_n = 0;

    std::optional<int> budget;
    std::optional<std::string> objective;

    std::int64_t n = 350000;
    std::string figure = "all";
    int fig3_points = 121;
};

// Output files of one command; removed again if the command fails.
class Outputs {
  public:
    Outputs(std::string dir, std::string comment) : dir_(std::move(dir)), comment_(std::move(comment)) {}

    void write(const std::string &name, const CsvTable &table) {
        const std::string path = (std::filesystem::path(dir_) / name).string();
        write_file_atomic(path, render_csv(table, comment_));
        written_.push_back(path);
    }

    void discard() {
        for (const auto &p : written_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        written_.clear();
    }

    const std::vector<std::string> &written() const { return written_; }

  private:
    std::string dir_;
    std::string comment_;
    std::vector<std::string> written_;
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream ss;
    ss << std::setprecision(digits) << v;
    return ss.str();
}

double hours(double runs, const RunConfig &config) { return runs / config.rates.run_rate / kSecondsPerHour; }

void apply_overrides(RunConfig &config, const Options &o) {
    if (o.epsilon) config.epsilon = *o.epsilon;
    if (o.coarse_n) config.coarse_n = *o.coarse_n;
    if (o.a) config.a = *o.a;
    if (o.alpha) config.alpha = {*o.alpha, 0.0};
    if (o.trials) config.trials = *o.trials;
    if (o.seed) config.seed = *o.seed;
    if (o.budget) config.optimizer.options.budget = *o.budget;
    if (o.objective) {
        require(*o.objective == "expected_runs" || *o.objective == "p_stop", ErrorCode::validation_error,
                "--objective must be expected_runs or p_stop");
        config.optimizer.objective = *o.objective == "p_stop" ? ObjectiveKind::p_stop : ObjectiveKind::expected_runs;
    }
    require(config.epsilon > 0.0 && config.epsilon <= 0.5, ErrorCode::validation_error,
            "'statistics.epsilon' must lie in (0, 0.5]");
    require(config.coarse_n >= 1, ErrorCode::validation_error, "'statistics.coarse_n' must be >= 1");
    require(config.a >= 0.0, ErrorCode::validation_error, "'statistics.a' must be >= 0");
    require(config.trials >= 1, ErrorCode::validation_error, "'simulation.trials' must be >= 1");
    require(std::abs(config.alpha) <= kMaxDisplacement, ErrorCode::validation_error,
            "'witness.alpha' must satisfy |alpha| <= 50");
    require(config.optimizer.options.budget >= 1, ErrorCode::validation_error, "'optimizer.budget' must be >= 1");
}

void report_chain(std::ostream &out, const ChainResult &chain) {
    out << "alpha applied: " << fmt(chain.alpha_applied.real()) << (chain.alpha_applied.imag() < 0 ? " - " : " + ")
        << fmt(std::abs(chain.alpha_applied.imag())) << "i\n";
    out << "ps1 = " << fmt(chain.stats.ps1, 8) << ", ps2 = " << fmt(chain.stats.ps2, 8)
        << ", pc = " << fmt(chain.stats.pc, 8) << ", g2 = " << fmt(g2(chain.stats), 8) << "\n";
    if (chain.asymmetry_warning) {
        out << "warning: singles differ by " << fmt(100.0 * chain.asymmetry, 3)
            << "% between the eyes; using their mean\n";
    }
}

CsvTable stop_table(const StopCurve &curve) {
    CsvTable t{{"N", "chi0", "p_stop"}, {}};
    for (const auto &p : curve.grid) t.add({p.n, p.chi0, p.p_stop});
    return t;
}

// g2 along an alpha scan for either the ideal superposition or the prepared
// state (displacement aligned with its coherence).
ClickStats scan_stats(const RunConfig &config, bool ideal, double alpha) {
    if (ideal) {
        return singles_and_coincidences(superposition_number_distribution(alpha, config.tail_tol), config.eye,
                                        config.eye, config.bs_reflectance);
    }
    ChainConfig chain = config.chain();
    chain.alpha = {alpha, 0.0};
    return evaluate_chain(chain).stats;
}

int cmd_g2_scan(const RunConfig &config, const Options &o, Outputs &files, std::ostream &out,
                const std::string &file_name) {
    require(o.points >= 2, ErrorCode::validation_error, "--points must be >= 2");
    require(o.alpha_min >= 0.0 && o.alpha_min < o.alpha_max && o.alpha_max <= kMaxDisplacement,
            ErrorCode::validation_error, "alpha range must satisfy 0 <= min < max <= 50");
    require(o.state == "ideal" || o.state == "prepared", ErrorCode::validation_error,
            "--state must be ideal or prepared");
    const bool ideal = o.state == "ideal";
    CsvTable t{{"alpha", "ps", "pc", "g2"}, {}};
    std::vector<double> alphas;
    std::vector<double> ratios;
    for (int i = 0; i < o.points; ++i) {
        const double alpha = o.alpha_min + (o.alpha_max - o.alpha_min) * i / (o.points - 1);
        const ClickStats s = scan_stats(config, ideal, alpha);
        const double denom = s.ps1 * s.ps2;
        const double ratio = denom > 0.0 ? s.pc / denom : std::numeric_limits<double>::quiet_NaN();
        t.add({alpha, 0.5 * (s.ps1 + s.ps2), s.pc, ratio});
        alphas.push_back(alpha);
        ratios.push_back(ratio);
    }
    files.write(file_name, t);

    out << "g2 scan (" << o.state << " state), " << o.points << " points on [" << fmt(o.alpha_min) << ", "
        << fmt(o.alpha_max) << "]\n";
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        if (std::isnan(ratios[i - 1]) || std::isnan(ratios[i])) continue;
        if ((ratios[i - 1] < 1.0) == (ratios[i] < 1.0)) continue;
        double lo = alphas[i - 1];
        double hi = alphas[i];
        const bool rising = ratios[i] >= 1.0;
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            const double r = g2(scan_stats(config, ideal, mid));
            if ((r >= 1.0) == rising) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out << "g2 crosses 1 at alpha = " << fmt(0.5 * (lo + hi), 5) << "\n";
    }
    return kExitOk;
}

int cmd_prepare(const RunConfig &config, Outputs &files, std::ostream &out) {
    const PreparedState s = conditional_state(config.prep);
    const auto &r = config.rates;
    const RateBudget rates = rate_budget(r.rep_rate, r.duty_cycle, r.p_pair, r.eta_herald, s.p_click_given_herald);
    const double snr = snr_budget(r.noise_over_signal, r.extinction_ratio);
    const Complex rho01 = s.rho(0, 1);

    CsvTable t{{"quantity", "value"}, {}};
    t.add({std::string("p_click_given_herald"), s.p_click_given_herald});
    t.add({std::string("fidelity_plus"), s.fidelity_plus});
    t.add({std::string("overlap_plus"), s.overlap_plus});
    t.add({std::string("fidelity_plus_ideal_source"), s.fidelity_plus_ideal_source});
    t.add({std::string("phase"), s.phase});
    t.add({std::string("rho00"), s.rho(0, 0).real()});
    t.add({std::string("rho11"), s.rho(1, 1).real()});
    t.add({std::string("rho01_re"), rho01.real()});
    t.add({std::string("rho01_im"), rho01.imag()});
    t.add({std::string("herald_rate_hz"), rates.herald_rate});
    t.add({std::string("trigger_rate_hz"), rates.trigger_rate});
    t.add({std::string("snr"), snr});
    files.write("prepare.csv", t);

    out << "conditional state (eta_c = " << fmt(config.prep.eta_c) << ", t = " << fmt(config.prep.t)
        << ", beta = " << fmt(std::abs(config.prep.beta)) << ", eta_d = " << fmt(config.prep.eta_d) << ")\n";
    out << "p_click_given_herald = " << fmt(s.p_click_given_herald) << "\n";
    out << "fidelity = " << fmt(s.fidelity_plus) << " (overlap " << fmt(s.overlap_plus)
        << ", perfect coupling " << fmt(s.fidelity_plus_ideal_source) << ")\n";
    out << "optimal phase = " << fmt(s.phase) << " rad\n";
    out << "herald rate = " << fmt(rates.herald_rate) << " Hz, trigger rate = " << fmt(rates.trigger_rate)
        << " Hz\n";
    out << "signal-to-noise = " << fmt(snr) << "\n";
    return kExitOk;
}

int cmd_plan(const RunConfig &config, const Options &o, Outputs &files, std::ostream &out, bool full) {
    const ChainResult chain = evaluate_chain(config.chain());
    CertificationPlan plan = make_plan(chain.cell, config.a, config.epsilon);
    const StopCurve curve =
        expected_runs(config.epsilon, config.coarse_n, plan, config.expected_runs_options(), config.limits);
    const double runs = curve.expected_runs;

    if (!full) {
        CsvTable t{{"epsilon", "coarse_n", "expected_runs", "remainder", "hours"}, {}};
        t.add({config.epsilon, config.coarse_n, runs, curve.remainder, hours(runs, config)});
        files.write("expected_runs.csv", t);
        out << "expected runs = " << fmt(runs, 8) << " (" << fmt(hours(runs, config), 4) << " h at "
            << fmt(config.rates.run_rate) << " Hz), epsilon = " << fmt(config.epsilon)
            << ", coarse_n = " << config.coarse_n << "\n";
        return kExitOk;
    }

    files.write("plan.csv", stop_table(curve));
    report_chain(out, chain);
    out << "b = " << fmt(plan.coeffs.b, 8) << ", c = " << fmt(plan.coeffs.c, 8) << ", d = " << fmt(plan.coeffs.d)
        << ", phi = " << fmt(plan.coeffs.phi, 8) << "\n";
    out << "projected coherent cell: ps = " << fmt(plan.ps_cl, 8) << ", center = (" << fmt(plan.center.x, 8) << ", "
        << fmt(plan.center.y, 8) << ")\n";
    out << "a = " << fmt(config.a) << ", epsilon = " << fmt(config.epsilon) << ", coarse_n = " << config.coarse_n
        << "\n";
    for (const auto n : o.at) {
        require(n >= 1, ErrorCode::validation_error, "--at values must be >= 1");
        const double chi0 = critical_chi0(config.epsilon, n, plan, config.critical(), config.limits);
        out << "P_stop(" << n << ") = " << fmt(p_stop(n, chi0, plan, config.limits)) << " (chi0 = " << fmt(chi0)
            << ")\n";
    }
    out << "expected runs = " << fmt(runs, 8) << " (remainder " << fmt(curve.remainder, 3) << ", "
        << fmt(hours(runs, config), 4) << " h at " << fmt(config.rates.run_rate) << " Hz)\n";
    if (const auto from = tail_decreasing_from(curve)) {
        out << "N (1 - P_stop) decreases from N = " << *from << " on\n";
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig &config, const Options &o, Outputs &files, std::ostream &out) {
    const ChainResult chain = evaluate_chain(config.chain());
    CertificationPlan plan = make_plan(chain.cell, config.a, config.epsilon);
    const StopCurve curve =
        expected_runs(config.epsilon, config.coarse_n, plan, config.expected_runs_options(), config.limits);
    SimulationOptions sim = config.simulation();
    sim.max_n = o.max_n > 0 ? o.max_n : curve.grid.back().n;
    const auto empirical = empirical_stop_curve(chain.cell, plan, config.coarse_n, sim);

    CsvTable t{{"N", "empirical_fraction", "wilson_low", "wilson_high", "analytic_p_stop"}, {}};
    std::size_t violations = 0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        const auto &e = empirical[i];
        const double analytic = i < curve.grid.size() ? curve.grid[i].p_stop
                                                      : p_stop(e.n, plan.chi0_at(e.n), plan, config.limits);
        const double half = 0.5 * (e.wilson_high - e.wilson_low);
        if (analytic > e.fraction + 3.0 * half) ++violations;
        t.add({e.n, e.fraction, e.wilson_low, e.wilson_high, analytic});
    }
    files.write("simulate.csv", t);
    out << "simulated " << config.trials << " experiments (seed " << config.seed << ", coarse_n " << config.coarse_n
        << ", epsilon " << fmt(config.epsilon) << ")\n";
    out << "checkpoints where analytic P_stop exceeds the empirical fraction by > 3 Wilson half-widths: "
        << violations << " of " << empirical.size() << "\n";
    return kExitOk;
}

int cmd_optimize(const RunConfig &config, Outputs &files, std::ostream &out) {
    const OptimizeResult r = optimize(config.optimizer, config.chain(), config.a, config.limits);
    std::vector<std::string> cols{"index", "stage"};
    for (const auto &n : r.names) cols.push_back(n);
    cols.push_back("value");
    cols.push_back("ok");
    CsvTable t{cols, {}};
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const auto &e = r.trace[i];
        std::vector<CsvCell> row{static_cast<std::int64_t>(i), e.stage};
        for (const double x : e.x) row.emplace_back(x);
        row.emplace_back(e.value);
        row.emplace_back(static_cast<std::int64_t>(e.ok ? 1 : 0));
        t.add(std::move(row));
    }
    files.write("optimize_trace.csv", t);
    out << "optimum after " << r.trace.size() << " evaluations"
        << (r.budget_exhausted ? " (budget exhausted, best so far)" : "") << ":\n";
    for (std::size_t i = 0; i < r.names.size(); ++i) out << "  " << r.names[i] << " = " << fmt(r.best[i], 6) << "\n";
    const bool runs = config.optimizer.objective == ObjectiveKind::expected_runs;
    out << (runs ? "expected runs = " : "P_stop = ") << fmt(runs ? r.value : 1.0 - r.value, 8)
        << " (best grid point " << fmt(runs ? r.best_grid_value : 1.0 - r.best_grid_value, 8) << ")\n";
    if (r.budget_exhausted) throw Error(ErrorCode::budget_exhausted, "optimizer budget exhausted");
    return kExitOk;
}

int cmd_classical_check(const RunConfig &config, const Options &o, Outputs &files, std::ostream &out) {
    require(o.n >= 1, ErrorCode::validation_error, "--n must be >= 1");
    const ChainResult chain = evaluate_chain(config.chain());
    const CertificationPlan plan = make_plan(chain.cell, config.a, config.epsilon);
    const double chi0 = critical_chi0(config.epsilon, o.n, plan, config.critical(), config.limits);
    std::vector<double> surface;
    const PValueResult pv = classical_pvalue(chi0, o.n, plan, config.scan, config.limits, &surface);
    const auto cells = classical_scan_cells(config.scan);
    CsvTable t{{"ps", "pc", "pvalue"}, {}};
    for (std::size_t i = 0; i < cells.size(); ++i) t.add({cells[i].ps, cells[i].pc, surface[i]});
    files.write("classical_check.csv", t);
    out << "N = " << o.n << ", chi0 = " << fmt(chi0, 8) << "\n";
    out << "worst-case classical p-value = " << fmt(pv.pvalue, 8) << " at ps = " << fmt(pv.argmax.ps, 8)
        << ", pc = " << fmt(pv.argmax.pc, 8) << "\n";
    out << "projected coherent cell: ps = " << fmt(plan.ps_cl, 8) << " ("
        << (pv.argmax_is_projected ? "argmax within one grid step" : "argmax elsewhere") << ")\n";
    out << "cells evaluated: " << pv.cells_evaluated << " of " << pv.cells_total << "\n";
    return kExitOk;
}

void figure_3(const RunConfig &config, const Options &o, Outputs &files) {
    const ChainResult chain = evaluate_chain(config.chain());
    const CertificationPlan plan = make_plan(chain.cell, config.a, config.epsilon);
    const std::int64_t n = o.n;
    const double chi0 = critical_chi0(config.epsilon, n, plan, config.critical(), config.limits);
    const auto &k = plan.coeffs;
    const double A = std::sqrt(k.c / k.b);
    const double B = k.d / std::sqrt(k.c * k.b);
    const double C = std::sqrt(k.b / k.c);
    const double cp = std::cos(k.phi);
    const double sp = std::sin(k.phi);

    const PlanePoint q = plan.to_plane(chain.cell.ps * chain.cell.ps, chain.cell.pc);
    const PlanePoint cl = plan.to_plane(plan.ps_cl * plan.ps_cl, plan.ps_cl * plan.ps_cl);
    const double pc = chain.cell.pc;
    const double sigma = std::sqrt(k.b * pc * (1.0 - pc) / (k.c * static_cast<double>(n)));
    const double span = std::hypot(q.x - cl.x, q.y - cl.y) + 5.0 * sigma;
    const double mx = 0.5 * (q.x + cl.x);
    const double my = 0.5 * (q.y + cl.y);

    const int m = o.fig3_points;
    require(m >= 3, ErrorCode::validation_error, "--grid must be >= 3");
    const CellProbabilities classical = plan.classical_cell();
    CsvTable grid{{"x", "y", "p_quantum", "p_classical", "chi"}, {}};
    const auto nd = static_cast<double>(n);
    for (int i = 0; i < m; ++i) {
        const double x = mx - span + 2.0 * span * i / (m - 1);
        for (int j = 0; j < m; ++j) {
            const double y = my - span + 2.0 * span * j / (m - 1);
            const double v = y / C;
            const double u = (x - B * v) / A;
            double pq = 0.0;
            double pcl = 0.0;
            double chi = std::numeric_limits<double>::quiet_NaN();
            if (u >= 0.0 && v >= 0.0) {
                const auto ns = static_cast<std::int64_t>(std::llround(nd * std::sqrt(u)));
                const auto nc = static_cast<std::int64_t>(std::llround(nd * v));
                if (nc <= ns && ns <= n) {
                    pq = std::exp(multinomial_log_pmf(ns, nc, n, chain.cell));
                    pcl = std::exp(multinomial_log_pmf(ns, nc, n, classical));
                    chi = plan.chi_at(u, v);
                }
            }
            grid.add({x, y, pq, pcl, chi});
        }
    }
    files.write("fig3_grid.csv", grid);

    CsvTable lines{{"curve", "x", "y"}, {}};
    // pc = ps^2 is the line (u, v) = (w, w)
    const double w_mid = plan.ps_cl * plan.ps_cl;
    const double dw = span / std::hypot(A + B, C);
    for (int i = 0; i < m; ++i) {
        const double w = w_mid - dw + 2.0 * dw * i / (m - 1);
        const PlanePoint p = plan.to_plane(w, w);
        lines.add({std::string("boundary"), p.x, p.y});
    }
    const double sx = plan.a > 0.0 ? std::min(span, std::sqrt(2.0 * span / plan.a)) : span;
    for (int i = 0; i < m; ++i) {
        const double xr = plan.center.x - sx + 2.0 * sx * i / (m - 1);
        const double dx = xr - plan.center.x;
        const double yr = plan.center.y + chi0 - plan.a * dx * dx;
        lines.add({std::string("estimator"), cp * xr - sp * yr, sp * xr + cp * yr});
    }
    lines.add({std::string("quantum_center"), q.x, q.y});
    lines.add({std::string("classical_center"), cl.x, cl.y});
    files.write("fig3_lines.csv", lines);
}

void figure_4(const RunConfig &config, Outputs &files) {
    const ChainResult chain = evaluate_chain(config.chain());
    CsvTable t{{"epsilon", "N", "chi0", "p_stop"}, {}};
    for (const double eps : {0.01, 0.1}) {
        CertificationPlan plan = make_plan(chain.cell, config.a, eps);
        const StopCurve curve = expected_runs(eps, config.coarse_n, plan, config.expected_runs_options(), config.limits);
        for (const auto &p : curve.grid) t.add({eps, p.n, p.chi0, p.p_stop});
    }
    files.write("fig4.csv", t);
}

int cmd_figures(const RunConfig &config, const Options &o, Outputs &files, std::ostream &out) {
    const std::string &f = o.figure;
    require(f == "fig1" || f == "fig3" || f == "fig4" || f == "all", ErrorCode::validation_error,
            "figure must be fig1, fig3, fig4 or all");
    if (f == "fig1" || f == "all") {
        Options scan = o;
        scan.state = "ideal";
        cmd_g2_scan(config, scan, files, out, "fig1.csv");
    }
    if (f == "fig3" || f == "all") figure_3(config, o, files);
    if (f == "fig4" || f == "all") figure_4(config, files);
    for (const auto &p : files.written()) out << "wrote " << p << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Simulator and certification planner for two-eye g2 experiments", "eyewit"};
    app.require_subcommand(1);
    Options o;
    app.add_option("-c,--config", o.config_path, "JSON configuration file");
    app.add_option("-o,--out", o.out_dir, "Directory for CSV outputs");
    app.add_flag("--dump-config", o.dump, "Print the resolved configuration");
    app.set_version_flag("--version", std::string(kVersion));

    const auto add_stat_flags = [&](CLI::App *sub) {
        sub->add_option("--epsilon", o.epsilon, "Target p-value");
        sub->add_option("--coarse-n", o.coarse_n, "Run-grid step");
        sub->add_option("--a", o.a, "Parabola steepness");
        sub->add_option("--alpha", o.alpha, "Displacement amplitude (aligned frame)");
    };

    auto *g2s = app.add_subcommand("g2-scan", "g2 as a function of the displacement amplitude");
    g2s->add_option("--alpha-min", o.alpha_min);
    g2s->add_option("--alpha-max", o.alpha_max);
    g2s->add_option("--points", o.points);
    g2s->add_option("--state", o.state, "ideal or prepared");
    auto *prep = app.add_subcommand("prepare", "Heralded state preparation and rate budget");
    auto *plan = app.add_subcommand("plan", "Certification plan, stopping curve and expected runs");
    add_stat_flags(plan);
    plan->add_option("--at", o.at, "Report P_stop at these run counts");
    auto *runs = app.add_subcommand("expected-runs", "Expected number of runs");
    add_stat_flags(runs);
    auto *sim = app.add_subcommand("simulate", "Monte Carlo stopping curve");
    add_stat_flags(sim);
    sim->add_option("--trials", o.trials);
    sim->add_option("--seed", o.seed);
    sim->add_option("--max-n", o.max_n);
    auto *opt = app.add_subcommand("optimize", "Search alpha, beta, a (and t)");
    opt->add_option("--budget", o.budget);
    opt->add_option("--objective", o.objective, "expected_runs or p_stop");
    auto *cc = app.add_subcommand("classical-check", "Worst-case classical p-value over the scan grid");
    add_stat_flags(cc);
    cc->add_option("--n", o.n, "Number of runs");
    auto *fig = app.add_subcommand("figures", "Plot data for the figures");
    add_stat_flags(fig);
    fig->add_option("which", o.figure, "fig1, fig3, fig4 or all");
    fig->add_option("--n", o.n, "Number of runs for fig3");
    fig->add_option("--grid", o.fig3_points, "Grid points per axis for fig3");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    CLI::App *sub = app.get_subcommands().front();
    std::unique_ptr<Outputs> files;
    try {
        RunConfig config = o.config_path.empty() ? parse_config("") : load_config(o.config_path);
        apply_environment(config);
        apply_overrides(config, o);
        if (o.dump) out << dump_config(config) << "\n";
        files = std::make_unique<Outputs>(o.out_dir, "eyewit " + std::string(kVersion) +
                                                         " config_hash=" + config_hash(config) +
                                                         " command=" + sub->get_name());
        if (sub == g2s) return cmd_g2_scan(config, o, *files, out, "g2_scan.csv");
        if (sub == prep) return cmd_prepare(config, *files, out);
        if (sub == plan) return cmd_plan(config, o, *files, out, true);
        if (sub == runs) return cmd_plan(config, o, *files, out, false);
        if (sub == sim) return cmd_simulate(config, o, *files, out);
        if (sub == opt) return cmd_optimize(config, *files, out);
        if (sub == cc) return cmd_classical_check(config, o, *files, out);
        return cmd_figures(config, o, *files, out);
    } catch (const Error &e) {
        if (files) files->discard();
        err << "error: " << e.what() << "\n";
        return e.is_resource_exhaustion() ? kExitResource : kExitInvalid;
    } catch (const std::exception &e) {
        if (files) files->discard();
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace eyewit
