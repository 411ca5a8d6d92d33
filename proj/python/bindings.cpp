#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "eyewit/cli.hpp"
#include "eyewit/config.hpp"
#include "eyewit/error.hpp"
#include "eyewit/montecarlo.hpp"
#include "eyewit/optimizer.hpp"
#include "eyewit/pipeline.hpp"

namespace py = pybind11;
using namespace eyewit;

PYBIND11_MODULE(_eyewit, m) {
    m.doc() = "Click-detector g2 witnesses and certification statistics for two-eye experiments.";
    m.attr("__version__") = std::string(kVersion);

    static py::exception<Error> error(m, "EyewitError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error &e) {
            py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(std::string(e.what()));
            inst.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error.ptr(), inst.ptr());
        }
    });

    py::class_<DetectorModel>(m, "DetectorModel")
        .def(py::init([](int theta, double eta, double dark_mean) {
                 DetectorModel d{theta, eta, dark_mean};
                 d.validate();
                 return d;
             }),
             py::arg("theta") = 7, py::arg("eta") = 0.08, py::arg("dark_mean") = 0.0)
        .def_readwrite("theta", &DetectorModel::theta)
        .def_readwrite("eta", &DetectorModel::eta)
        .def_readwrite("dark_mean", &DetectorModel::dark_mean)
        .def_static("hecht_eye", &DetectorModel::hecht_eye)
        .def_static("non_pnr", &DetectorModel::non_pnr, py::arg("eta"))
        .def("__repr__", [](const DetectorModel &d) {
            std::ostringstream s;
            s << "DetectorModel(theta=" << d.theta << ", eta=" << d.eta << ", dark_mean=" << d.dark_mean << ")";
            return s.str();
        });

    m.def("click_prob_fock", &click_prob_fock, py::arg("n"), py::arg("detector"));
    m.def("click_prob_coherent", &click_prob_coherent, py::arg("mu"), py::arg("detector"));
    m.def("displaced_fock_amplitude", &displaced_fock_amplitude, py::arg("n"), py::arg("m"), py::arg("alpha"));

    py::class_<ClickStats>(m, "ClickStats")
        .def_readonly("ps1", &ClickStats::ps1)
        .def_readonly("ps2", &ClickStats::ps2)
        .def_readonly("pc", &ClickStats::pc)
        .def_property_readonly("g2", [](const ClickStats &s) { return g2(s); });

    m.def(
        "superposition_g2_scan",
        [](const std::vector<double> &alphas, const DetectorModel &det, double r) {
            std::vector<py::tuple> out;
            for (const auto &p : superposition_g2_scan(alphas, det, det, r)) out.push_back(py::make_tuple(p.alpha, p.ps, p.pc, p.g2));
            return out;
        },
        py::arg("alphas"), py::arg("detector") = DetectorModel::hecht_eye(), py::arg("reflectance") = 0.5,
        "(alpha, ps, pc, g2) for D(alpha)(|0>+|1>)/sqrt(2) with two identical detectors.");
    m.def(
        "find_g2_crossing",
        [](double lo, double hi, const DetectorModel &det, double r, double tol) {
            return find_g2_crossing(lo, hi, det, det, r, tol);
        },
        py::arg("lo"), py::arg("hi"), py::arg("detector") = DetectorModel::hecht_eye(), py::arg("reflectance") = 0.5,
        py::arg("tol") = 1e-3);
    m.def(
        "coherent_stats",
        [](std::complex<double> alpha, const DetectorModel &d1, const DetectorModel &d2, double r) {
            return classical_ensemble_stats(ClassicalEnsemble::coherent(alpha), d1, d2, r);
        },
        py::arg("alpha"), py::arg("det1"), py::arg("det2"), py::arg("reflectance") = 0.5);
    m.def("variance_ratio", &variance_ratio, py::arg("alpha"));

    py::class_<PreparationParams>(m, "PreparationParams")
        .def(py::init([](double eta_c, double t, std::complex<double> beta, double eta_d) {
                 PreparationParams p;
                 p.eta_c = eta_c;
                 p.t = t;
                 p.beta = beta;
                 p.eta_d = eta_d;
                 p.validate();
                 return p;
             }),
             py::arg("eta_c") = 0.8, py::arg("t") = 0.98, py::arg("beta") = std::complex<double>(0.08, 0.0),
             py::arg("eta_d") = 0.5)
        .def_readwrite("eta_c", &PreparationParams::eta_c)
        .def_readwrite("t", &PreparationParams::t)
        .def_readwrite("beta", &PreparationParams::beta)
        .def_readwrite("eta_d", &PreparationParams::eta_d);

    m.def(
        "conditional_state",
        [](const PreparationParams &p) {
            const PreparedState s = conditional_state(p);
            py::dict d;
            d["p_click_given_herald"] = s.p_click_given_herald;
            d["fidelity_plus"] = s.fidelity_plus;
            d["overlap_plus"] = s.overlap_plus;
            d["fidelity_plus_ideal_source"] = s.fidelity_plus_ideal_source;
            d["phase"] = s.phase;
            d["rho"] = py::make_tuple(py::make_tuple(s.rho(0, 0), s.rho(0, 1)), py::make_tuple(s.rho(1, 0), s.rho(1, 1)));
            return d;
        },
        py::arg("params") = PreparationParams{});
    m.def(
        "herald_rate",
        [](double rep_rate, double duty, double p_pair, double eta) {
            return rate_budget(rep_rate, duty, p_pair, eta, 0.0).herald_rate;
        },
        py::arg("rep_rate") = 80e6, py::arg("duty_cycle") = 0.02, py::arg("p_pair") = 0.8e-3,
        py::arg("eta_herald") = 0.08);

    py::class_<CellProbabilities>(m, "Cell")
        .def(py::init([](double ps, double pc) {
                 CellProbabilities c{ps, pc};
                 c.validate();
                 return c;
             }),
             py::arg("ps"), py::arg("pc"))
        .def_readonly("ps", &CellProbabilities::ps)
        .def_readonly("pc", &CellProbabilities::pc)
        .def("__repr__", [](const CellProbabilities &c) {
            std::ostringstream s;
            s.precision(17);
            s << "Cell(ps=" << c.ps << ", pc=" << c.pc << ")";
            return s.str();
        });

    m.def(
        "chain_cell",
        [](const DetectorModel &eye, double alpha, const PreparationParams &prep) {
            ChainConfig c;
            c.eye = eye;
            c.alpha = {alpha, 0.0};
            c.prep = prep;
            return evaluate_chain(c).cell;
        },
        py::arg("eye") = DetectorModel::hecht_eye(), py::arg("alpha") = 10.99, py::arg("prep") = PreparationParams{},
        "Symmetrized two-eye cell of the full heralded chain.");

    py::enum_<ClassicalStrategy>(m, "ClassicalStrategy")
        .value("projected", ClassicalStrategy::projected)
        .value("scan", ClassicalStrategy::scan);

    py::class_<CertificationPlan>(m, "Plan")
        .def(py::init(&make_plan), py::arg("cell"), py::arg("a") = 40.0, py::arg("epsilon") = 0.01)
        .def_readonly("cell_q", &CertificationPlan::cell_q)
        .def_readonly("ps_cl", &CertificationPlan::ps_cl)
        .def_readonly("a", &CertificationPlan::a)
        .def_readonly("chi0_by_n", &CertificationPlan::chi0_by_n)
        .def("chi", [](const CertificationPlan &p, std::int64_t ns, std::int64_t nc, std::int64_t n) {
            return estimator_chi(ns, nc, n, p);
        })
        .def("acceptance", [](const CertificationPlan &p, const CellProbabilities &cell, std::int64_t n,
                              double chi0) { return acceptance_probability(p, cell, n, chi0); },
             py::arg("cell"), py::arg("n"), py::arg("chi0"))
        .def("p_stop", [](const CertificationPlan &p, std::int64_t n, double chi0) { return p_stop(n, chi0, p); },
             py::arg("n"), py::arg("chi0"))
        .def(
            "critical_chi0",
            [](const CertificationPlan &p, std::int64_t n, ClassicalStrategy strategy, double rel_tol) {
                CriticalOptions o;
                o.strategy = strategy;
                o.rel_tol = rel_tol;
                return critical_chi0(p.epsilon, n, p, o);
            },
            py::arg("n"), py::arg("strategy") = ClassicalStrategy::scan, py::arg("rel_tol") = 1e-3)
        .def(
            "expected_runs",
            [](CertificationPlan &p, std::int64_t coarse_n, ClassicalStrategy strategy, double stop_tail) {
                ExpectedRunsOptions o;
                o.critical.strategy = strategy;
                o.stop_tail = stop_tail;
                const StopCurve c = expected_runs(p.epsilon, coarse_n, p, o);
                py::dict d;
                d["expected_runs"] = c.expected_runs;
                d["remainder"] = c.remainder;
                std::vector<py::tuple> grid;
                for (const auto &g : c.grid) grid.push_back(py::make_tuple(g.n, g.chi0, g.p_stop));
                d["grid"] = grid;
                return d;
            },
            py::arg("coarse_n") = 12500, py::arg("strategy") = ClassicalStrategy::scan, py::arg("stop_tail") = 1e-4,
            "Fills the plan's critical-value table and returns <N> with the (N, chi0, P_stop) grid.")
        .def(
            "simulate",
            [](const CertificationPlan &p, std::int64_t coarse_n, std::int64_t trials, std::uint64_t seed) {
                SimulationOptions o;
                o.trials = trials;
                o.master_seed = seed;
                std::vector<py::tuple> out;
                for (const auto &e : empirical_stop_curve(p.cell_q, p, coarse_n, o))
                    out.push_back(py::make_tuple(e.n, e.fraction, e.wilson_low, e.wilson_high));
                return out;
            },
            py::arg("coarse_n"), py::arg("trials") = 1000, py::arg("seed") = 1);

    m.def(
        "minimize",
        [](const std::function<double(std::vector<double>)> &f, const std::vector<std::tuple<double, double, int>> &box,
           int budget) {
            std::vector<ParameterBound> bounds;
            for (std::size_t i = 0; i < box.size(); ++i)
                bounds.push_back({"x" + std::to_string(i), std::get<0>(box[i]), std::get<1>(box[i]), std::get<2>(box[i])});
            OptimizeOptions o;
            o.budget = budget;
            const auto r = minimize([&](std::span<const double> x) { return f({x.begin(), x.end()}); }, bounds, o);
            return py::make_tuple(r.best, r.value, r.trace.size(), r.budget_exhausted);
        },
        py::arg("f"), py::arg("bounds"), py::arg("budget") = 3000,
        "Grid then Nelder-Mead over (lo, hi, grid_points) boxes; returns (x, value, evaluations, exhausted).");

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line; returns (exit_code, stdout, stderr).");
}
