#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rrreg/barrier.hpp"
#include "rrreg/brm.hpp"
#include "rrreg/data_table.hpp"
#include "rrreg/design.hpp"
#include "rrreg/driver.hpp"
#include "rrreg/errors.hpp"
#include "rrreg/logbin.hpp"
#include "rrreg/report.hpp"
#include "rrreg/sim.hpp"
#include "rrreg/tabular.hpp"
#include "rrreg/weighted_ee.hpp"

namespace py = pybind11;
using namespace rrreg;

namespace {

TwoByTwoTable make_table(double a, double b, double c, double d) {
    TwoByTwoTable t{a, b, c, d};
    t.validate();
    return t;
}

FitOptions make_options(double tol, int max_iter,
                        const std::optional<Eigen::VectorXd>& start) {
    FitOptions o;
    if (tol > 0) o.tol = tol;
    if (max_iter > 0) o.max_iter = max_iter;
    if (start) o.start = *start;
    return o;
}

}  // namespace

PYBIND11_MODULE(_rrreg, m) {
    m.doc() = "risk-ratio regression toolkit (C++ core)";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<EstimateError>(m, "EstimateError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<DesignError>(m, "DesignError", PyExc_ValueError);
    py::register_exception<StartError>(m, "StartError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::class_<RatioEstimate>(m, "RatioEstimate")
        .def_readonly("point", &RatioEstimate::point)
        .def_readonly("ci_low", &RatioEstimate::ci_low)
        .def_readonly("ci_high", &RatioEstimate::ci_high)
        .def_readonly("level", &RatioEstimate::level)
        .def_readonly("label", &RatioEstimate::label)
        .def_readonly("degenerate_ci", &RatioEstimate::degenerate_ci)
        .def("__repr__", [](const RatioEstimate& e) {
            return "RatioEstimate(point=" + std::to_string(e.point) + ", ci=(" +
                   std::to_string(e.ci_low) + ", " + std::to_string(e.ci_high) + "))";
        });

    m.def(
        "risk_ratio",
        [](double a, double b, double c, double d, double level) {
            return risk_ratio(make_table(a, b, c, d), level);
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("level") = 0.95);
    m.def(
        "odds_ratio",
        [](double a, double b, double c, double d, double level) {
            return odds_ratio(make_table(a, b, c, d), level);
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("level") = 0.95);
    m.def(
        "mantel_haenszel_rr",
        [](const std::vector<std::pair<std::string, std::array<double, 4>>>& strata,
           double level) {
            StratifiedTables st;
            for (const auto& [label, cells] : strata) {
                st.strata.push_back(
                    {label, make_table(cells[0], cells[1], cells[2], cells[3])});
            }
            return mantel_haenszel_rr(st, level);
        },
        py::arg("strata"), py::arg("level") = 0.95,
        "Pooled risk ratio over [(label, (a, b, c, d)), ...] strata");

    m.def(
        "or_rr_ratio", [](double p0, double rr) { return or_rr_ratio({p0, rr}); },
        py::arg("p0"), py::arg("rr"));
    m.def("rr_from_or", &rr_from_or, py::arg("odds_ratio"), py::arg("p0"));
    m.def("feasible", &feasible, py::arg("p0"), py::arg("rr"));
    m.def(
        "maclaurin_weight",
        [](double p, int order) { return maclaurin_weight(p, WeightOrder(order)); },
        py::arg("p"), py::arg("order"));

    m.def(
        "probs_from_theta_phi",
        [](double theta, double phi) {
            const ProbPair pp = probs_from_theta_phi(theta, phi);
            return py::make_tuple(pp.p0, pp.p1);
        },
        py::arg("theta"), py::arg("phi"),
        "(p0, p1) for a (log risk-ratio, log odds-product) pair");
    m.def(
        "theta_phi_from_probs",
        [](double p0, double p1) {
            const auto [theta, phi] = theta_phi_from_probs(p0, p1);
            return py::make_tuple(theta, phi);
        },
        py::arg("p0"), py::arg("p1"));

    // data handling --------------------------------------------------------
    py::class_<DataTable>(m, "DataTable")
        .def_property_readonly("n_rows", &DataTable::n_rows)
        .def_property_readonly("names", &DataTable::names)
        .def("__len__", &DataTable::n_rows);
    m.def("load_csv", &load_csv, py::arg("path"));
    m.def("derive_nhefs", &derive_nhefs, py::arg("table"));
    m.def("nhefs_model_terms", [] { return nhefs_model_terms(); });
    m.def("nhefs_source_url", &nhefs_source_url);

    py::class_<DesignMatrix>(m, "DesignMatrix")
        .def_readonly("X", &DesignMatrix::X)
        .def_readonly("y", &DesignMatrix::y)
        .def_readonly("col_names", &DesignMatrix::col_names)
        .def_readonly("kept_row_ids", &DesignMatrix::kept_row_ids)
        .def_property_readonly("n", &DesignMatrix::n)
        .def_property_readonly("p", &DesignMatrix::p);
    m.def("build_design", &build_design, py::arg("table"), py::arg("outcome"),
          py::arg("terms"));

    // fitting ----------------------------------------------------------------
    py::class_<FitResult>(m, "FitResult")
        .def_readonly("beta", &FitResult::beta)
        .def_readonly("vcov", &FitResult::vcov)
        .def_readonly("loglik", &FitResult::loglik)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("boundary", &FitResult::boundary)
        .def_readonly("fitted_p", &FitResult::fitted_p)
        .def_readonly("fitted_out_of_range", &FitResult::fitted_out_of_range)
        .def_readonly("note", &FitResult::note);

    m.def(
        "fit_irls",
        [](const DesignMatrix& d, double tol, int max_iter,
           const std::optional<Eigen::VectorXd>& start) {
            return fit_irls(d, make_options(tol, max_iter, start));
        },
        py::arg("design"), py::arg("tol") = -1.0, py::arg("max_iter") = -1,
        py::arg("start") = std::nullopt);
    m.def(
        "fit_adaptive_barrier",
        [](const DesignMatrix& d, double tol, int max_iter,
           const std::optional<Eigen::VectorXd>& start) {
            BarrierOptions o;
            o.inner = make_options(tol, max_iter, start);
            return fit_adaptive_barrier(d, o);
        },
        py::arg("design"), py::arg("tol") = -1.0, py::arg("max_iter") = -1,
        py::arg("start") = std::nullopt);
    m.def(
        "solve_ee",
        [](const DesignMatrix& d, int order, double tol, int max_iter,
           const std::optional<Eigen::VectorXd>& start) {
            EEOptions o;
            if (tol > 0) o.tol = tol;
            if (max_iter > 0) o.max_iter = max_iter;
            if (start) o.start = *start;
            return solve_ee(d, WeightOrder(order), o);
        },
        py::arg("design"), py::arg("order") = 0, py::arg("tol") = -1.0,
        py::arg("max_iter") = -1, py::arg("start") = std::nullopt);
    m.def(
        "sandwich_vcov",
        [](const FitResult& fit, const DesignMatrix& d, int order) {
            return sandwich_vcov(fit, d, WeightOrder(order));
        },
        py::arg("fit"), py::arg("design"), py::arg("order") = 0);
    m.def("poisson_model_vcov", &poisson_model_vcov, py::arg("fit"), py::arg("design"));
    m.def(
        "wald_ratio",
        [](const FitResult& fit, int index, double level) {
            return wald_ratio(fit, index, level);
        },
        py::arg("fit"), py::arg("index") = 1, py::arg("level") = 0.95);
    m.def("default_start", &default_start, py::arg("design"));
    m.def("log_likelihood", &log_likelihood, py::arg("beta"), py::arg("design"));

    // binary regression model -------------------------------------------------
    py::class_<PropensityFit>(m, "PropensityFit")
        .def_readonly("gamma", &PropensityFit::gamma)
        .def_readonly("converged", &PropensityFit::converged)
        .def_readonly("separation", &PropensityFit::separation)
        .def_readonly("iterations", &PropensityFit::iterations);
    m.def(
        "fit_propensity",
        [](const Eigen::VectorXd& x, const Eigen::MatrixXd& v) {
            return fit_propensity(x, v, {});
        },
        py::arg("x"), py::arg("v_prop"));

    py::class_<BrmFit>(m, "BrmFit")
        .def_readonly("alpha", &BrmFit::alpha)
        .def_readonly("eta", &BrmFit::eta)
        .def_readonly("gamma", &BrmFit::gamma)
        .def_readonly("rr", &BrmFit::rr)
        .def_readonly("loglik", &BrmFit::loglik)
        .def_readonly("converged", &BrmFit::converged)
        .def_readonly("n_boot_used", &BrmFit::n_boot_used)
        .def_readonly("note", &BrmFit::note);

    auto make_brm = [](const Eigen::MatrixXd& v_theta, const Eigen::MatrixXd& v_phi,
                       const Eigen::MatrixXd& v_prop, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y) {
        BrmDesigns bd;
        bd.v_theta = v_theta;
        bd.v_phi = v_phi;
        bd.v_prop = v_prop;
        bd.x = x;
        bd.y = y;
        return bd;
    };
    m.def(
        "fit_brm_mle",
        [make_brm](const Eigen::MatrixXd& v_theta, const Eigen::MatrixXd& v_phi,
                   const Eigen::MatrixXd& v_prop, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, std::uint64_t seed, int bootstrap) {
            BrmOptions o;
            o.seed = seed;
            o.bootstrap = bootstrap;
            o.bootstrap_ci = bootstrap > 0;
            return fit_brm_mle(make_brm(v_theta, v_phi, v_prop, x, y), o);
        },
        py::arg("v_theta"), py::arg("v_phi"), py::arg("v_prop"), py::arg("x"),
        py::arg("y"), py::arg("seed") = 20240811, py::arg("bootstrap") = 0);
    m.def(
        "fit_brm_dr",
        [make_brm](const Eigen::MatrixXd& v_theta, const Eigen::MatrixXd& v_phi,
                   const Eigen::MatrixXd& v_prop, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, std::uint64_t seed, int bootstrap) {
            BrmOptions o;
            o.seed = seed;
            o.bootstrap = bootstrap;
            o.bootstrap_ci = bootstrap > 0;
            return fit_brm_dr(make_brm(v_theta, v_phi, v_prop, x, y), o);
        },
        py::arg("v_theta"), py::arg("v_phi"), py::arg("v_prop"), py::arg("x"),
        py::arg("y"), py::arg("seed") = 20240811, py::arg("bootstrap") = 0);

    // simulation ---------------------------------------------------------------
    m.def(
        "run_study_config",
        [](const std::string& config_text, std::optional<std::uint64_t> seed) {
            StudyConfig cfg = parse_study_config(config_text);
            if (seed) cfg.seed = *seed;
            return study_json(run_study(cfg.dgp, cfg.methods, cfg.reps, cfg.seed));
        },
        py::arg("config_text"), py::arg("seed") = std::nullopt,
        "Parse a key=value study config, run it, return the JSON summary");

    // reports ---------------------------------------------------------------
    m.def(
        "nhefs_report_json",
        [](const std::string& path, std::uint64_t seed, int bootstrap) {
            return report_to_json(nhefs_table_report(path, seed, bootstrap)).dump(2);
        },
        py::arg("path"), py::arg("seed") = 20240811, py::arg("bootstrap") = 500);
}
