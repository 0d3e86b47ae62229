#include "rrreg/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "rrreg/barrier.hpp"
#include "rrreg/brm.hpp"
#include "rrreg/design.hpp"
#include "rrreg/errors.hpp"
#include "rrreg/logbin.hpp"
#include "rrreg/tabular.hpp"
#include "rrreg/weighted_ee.hpp"

namespace rrreg {

namespace {

const char* kNhefsDerivationNote =
    "incomeb=1[income>15]; maritalb=1[marital>2]; wtb=1[wt82_71>median of "
    "non-missing wt82_71 (average-two-middle convention)]";

FitOptions make_fit_options(const FitRequest& req, const DesignMatrix& d) {
    FitOptions o;
    if (req.tol > 0) o.tol = req.tol;
    if (req.max_iter > 0) o.max_iter = req.max_iter;
    if (req.start) {
        Eigen::VectorXd s(static_cast<Eigen::Index>(req.start->size()));
        for (std::size_t i = 0; i < req.start->size(); ++i) {
            s[static_cast<Eigen::Index>(i)] = (*req.start)[i];
        }
        if (s.size() != d.X.cols()) {
            throw StartError("start vector has " + std::to_string(s.size()) +
                             " entries, design has " + std::to_string(d.X.cols()) +
                             " columns");
        }
        o.start = s;
    }
    return o;
}

std::string level_string(const DataTable::Column& col, std::size_t row) {
    if (col.kind == DataTable::ColKind::Categorical) return col.cat[row];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", col.num[row]);
    return buf;
}

StratifiedTables stratify(const DataTable& dt, const std::string& outcome,
                          const std::string& exposure, const std::string& by) {
    for (const auto& name : {outcome, exposure, by}) {
        if (!dt.has(name)) throw DataError("column '" + name + "' not found");
    }
    const auto& yc = dt.col(outcome);
    const auto& xc = dt.col(exposure);
    const auto& bc = dt.col(by);
    if (yc.kind != DataTable::ColKind::Numeric) {
        throw DataError("outcome '" + outcome + "' must be numeric 0/1");
    }

    auto binary_value = [](const DataTable::Column& c, std::size_t i,
                           const std::string& what) {
        const double v = c.kind == DataTable::ColKind::Numeric
                             ? c.num[i]
                             : (c.cat[i] == "1" ? 1.0 : (c.cat[i] == "0" ? 0.0 : -1.0));
        if (v != 0.0 && v != 1.0) throw DataError(what + " is not binary");
        return v == 1.0;
    };

    std::map<std::string, TwoByTwoTable> tables;
    for (std::size_t i = 0; i < dt.n_rows(); ++i) {
        if (yc.missing[i] || xc.missing[i] || bc.missing[i]) continue;
        const bool yi = binary_value(yc, i, "outcome '" + outcome + "'");
        const bool xi = binary_value(xc, i, "exposure '" + exposure + "'");
        TwoByTwoTable& t = tables[level_string(bc, i)];
        if (xi && yi) t.a += 1;
        else if (xi) t.b += 1;
        else if (yi) t.c += 1;
        else t.d += 1;
    }
    StratifiedTables st;
    for (auto& [label, table] : tables) st.strata.push_back({label, table});
    return st;
}

int design_rows_used(const StratifiedTables& st) {
    double n = 0;
    for (const auto& s : st.strata) n += s.table.n();
    return static_cast<int>(n);
}

ReportRow row_from_fit(const FitResult& fit, const DesignMatrix& d, double level) {
    ReportRow row;
    const RatioEstimate est = wald_ratio(fit, 1, level);
    row.rr = est.point;
    row.ci_low = est.ci_low;
    row.ci_high = est.ci_high;
    row.level = level;
    row.converged = fit.converged;
    row.boundary = fit.boundary;
    row.iterations = fit.iterations;
    row.loglik = fit.loglik;
    row.n_used = d.n();
    row.note = fit.note;
    return row;
}

struct ParsedMethod {
    enum class Kind { Mh, Irls, Ab, Wee, BrmMle, BrmDr } kind;
    int wee_order = 0;
};

ParsedMethod parse_method(const std::string& method) {
    if (method == "mh") return {ParsedMethod::Kind::Mh, 0};
    if (method == "irls") return {ParsedMethod::Kind::Irls, 0};
    if (method == "ab") return {ParsedMethod::Kind::Ab, 0};
    if (method == "brm-mle") return {ParsedMethod::Kind::BrmMle, 0};
    if (method == "brm-dr") return {ParsedMethod::Kind::BrmDr, 0};
    if (method == "poisson") return {ParsedMethod::Kind::Wee, 0};
    if (method == "fitzmaurice60") return {ParsedMethod::Kind::Wee, 60};
    if (method == "wee") return {ParsedMethod::Kind::Wee, 0};
    if (method.rfind("wee:", 0) == 0) {
        int m;
        try {
            m = std::stoi(method.substr(4));
        } catch (...) {
            throw DataError("bad weighted-EE order in method '" + method + "'");
        }
        if (m < 0) throw DataError("weighted-EE order must be non-negative");
        return {ParsedMethod::Kind::Wee, m};
    }
    throw DataError("unknown method '" + method +
                    "' (expected mh, irls, ab, wee[:M], poisson, fitzmaurice60, "
                    "brm-mle or brm-dr)");
}

BrmDesigns brm_designs_from(const DesignMatrix& d) {
    const Eigen::Index n = d.X.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d.X(i, 1) != 0.0 && d.X(i, 1) != 1.0) {
            throw DesignError("brm: exposure column must be 0/1");
        }
    }
    BrmDesigns bd;
    const Eigen::Index extra = d.X.cols() - 2;
    bd.v_theta.resize(n, extra + 1);
    bd.v_theta.col(0).setOnes();
    if (extra > 0) bd.v_theta.rightCols(extra) = d.X.rightCols(extra);
    bd.v_phi = bd.v_theta;
    bd.v_prop = bd.v_theta;
    bd.x = d.X.col(1);
    bd.y = d.y;
    return bd;
}

ReportRow brm_row(const BrmFit& fit, int n_used, double level) {
    ReportRow row;
    row.rr = fit.rr.point;
    row.ci_low = fit.rr.ci_low;
    row.ci_high = fit.rr.ci_high;
    row.level = level;
    row.converged = fit.converged;
    row.degenerate_ci = fit.rr.degenerate_ci;
    row.n_used = n_used;
    row.note = fit.note;
    if (fit.method == BrmFit::Method::Mle) row.loglik = fit.loglik;
    return row;
}

}  // namespace

bool report_all_converged(const Report& r) {
    return std::all_of(r.rows.begin(), r.rows.end(), [](const ReportRow& row) {
        return !row.has_estimate || row.converged;
    });
}

Report run_fit(const FitRequest& req) {
    DataTable dt = load_csv(req.data_path);
    Report report;
    report.dataset = req.data_path;
    report.seed = req.seed;
    if (req.nhefs_derive) {
        dt = derive_nhefs(dt);
        report.derivation = kNhefsDerivationNote;
    }
    if (req.outcome.empty() || req.exposure.empty()) {
        throw DataError("fit: outcome and exposure are required");
    }

    const ParsedMethod pm = parse_method(req.method);

    if (pm.kind == ParsedMethod::Kind::Mh) {
        if (req.by.empty()) throw DataError("method mh requires --by STRATIFIER");
        const StratifiedTables st = stratify(dt, req.outcome, req.exposure, req.by);
        const RatioEstimate est = mantel_haenszel_rr(st, req.level);
        ReportRow row;
        row.method = "Mantel Haenszel (Combined)";
        row.rr = est.point;
        row.ci_low = est.ci_low;
        row.ci_high = est.ci_high;
        row.level = req.level;
        row.n_used = design_rows_used(st);
        row.note = "stratified by " + req.by + " (" + std::to_string(st.strata.size()) +
                   " strata)";
        report.rows.push_back(row);
        return report;
    }

    std::vector<std::string> terms = {req.exposure};
    terms.insert(terms.end(), req.covariates.begin(), req.covariates.end());
    const DesignMatrix d = build_design(dt, req.outcome, terms);
    const FitOptions fo = make_fit_options(req, d);

    switch (pm.kind) {
        case ParsedMethod::Kind::Irls: {
            ReportRow row = row_from_fit(fit_irls(d, fo), d, req.level);
            row.method = "GLM (Family=binomial, link=log)";
            row.estimation = "MLE";
            row.computation = "IRLS";
            report.rows.push_back(row);
            break;
        }
        case ParsedMethod::Kind::Ab: {
            BarrierOptions bo;
            bo.inner = fo;
            ReportRow row = row_from_fit(fit_adaptive_barrier(d, bo), d, req.level);
            row.method = "Logbinomial";
            row.estimation = "MLE";
            row.computation = "AB";
            report.rows.push_back(row);
            break;
        }
        case ParsedMethod::Kind::Wee: {
            EEOptions eo;
            if (req.tol > 0) eo.tol = req.tol;
            if (req.max_iter > 0) eo.max_iter = req.max_iter;
            if (fo.start) eo.start = fo.start;
            const WeightOrder order(pm.wee_order);
            FitResult fit = solve_ee(d, order, eo);
            if (req.se_kind == "sandwich" && fit.converged) {
                fit.vcov = sandwich_vcov(fit, d, order, eo.fd_step);
            } else if (req.se_kind != "sandwich" && req.se_kind != "model") {
                throw DataError("unknown se kind '" + req.se_kind + "'");
            }
            ReportRow row = row_from_fit(fit, d, req.level);
            if (pm.wee_order == 0) {
                row.method = "GLM (Se=" + req.se_kind + ") (Family=Poisson, link=log)";
                row.estimation = "MLE";
                row.computation = "IRLS";
            } else {
                row.method = "Weighted EE (M=" + std::to_string(pm.wee_order) +
                             ", Se=" + req.se_kind + ")";
                row.estimation = "EE";
                row.computation = "Newton";
            }
            if (fit.fitted_out_of_range) {
                row.note = row.note.empty() ? "some fitted probabilities exceed 1"
                                            : row.note + "; some fitted probabilities exceed 1";
            }
            report.rows.push_back(row);
            break;
        }
        case ParsedMethod::Kind::BrmMle:
        case ParsedMethod::Kind::BrmDr: {
            BrmOptions bo;
            bo.fit = fo;
            if (req.tol <= 0) bo.fit.tol = 1e-8;
            bo.seed = req.seed;
            bo.bootstrap = req.bootstrap;
            bo.bootstrap_ci = req.bootstrap > 0;
            const BrmDesigns bd = brm_designs_from(d);
            const BrmFit fit = pm.kind == ParsedMethod::Kind::BrmMle
                                   ? fit_brm_mle(bd, bo)
                                   : fit_brm_dr(bd, bo);
            ReportRow row = brm_row(fit, d.n(), req.level);
            row.method = "Binary Regression model";
            row.estimation = pm.kind == ParsedMethod::Kind::BrmMle ? "MLE" : "DR";
            row.computation =
                pm.kind == ParsedMethod::Kind::BrmMle ? "quasi-Newton" : "g-estimation";
            report.rows.push_back(row);
            break;
        }
        default:
            break;
    }
    return report;
}

Report nhefs_table_report(const std::string& data_path, std::uint64_t seed,
                          int bootstrap) {
    const DataTable raw = load_csv(data_path);
    const DataTable dt = derive_nhefs(raw);

    Report report;
    report.dataset = data_path;
    report.derivation = kNhefsDerivationNote;
    report.seed = seed;

    // Mantel-Haenszel by sex.
    {
        const StratifiedTables st = stratify(dt, "wtb", "qsmk", "sex");
        const RatioEstimate est = mantel_haenszel_rr(st);
        ReportRow row;
        row.method = "Mantel Haenszel (Combined)";
        row.rr = est.point;
        row.ci_low = est.ci_low;
        row.ci_high = est.ci_high;
        row.n_used = design_rows_used(st);
        row.note = "stratified by sex";
        report.rows.push_back(row);
    }

    const DesignMatrix d = build_design(dt, "wtb", nhefs_model_terms());

    // Raw GLM emulation: a zero start puts every fitted p at 1, which the
    // engine rejects, mirroring the non-convergence of an unstarted fit.
    {
        ReportRow row;
        row.method = "GLM (Family=binomial, link=log)";
        row.estimation = "MLE";
        row.computation = "IRLS";
        row.has_estimate = false;
        row.converged = false;
        row.n_used = d.n();
        try {
            FitOptions fo;
            fo.start = Eigen::VectorXd::Zero(d.X.cols());
            fit_irls(d, fo);
        } catch (const StartError& e) {
            row.note = std::string("NC: ") + e.what();
        }
        report.rows.push_back(row);
    }

    {
        ReportRow row = row_from_fit(fit_irls(d, {}), d, 0.95);
        row.method = "GLM with starting values (Family=binomial, link=log)";
        row.estimation = "MLE";
        row.computation = "IRLS";
        report.rows.push_back(row);
    }

    {
        const WeightOrder order(0);
        FitResult fit = solve_ee(d, order, {});
        if (fit.converged) fit.vcov = sandwich_vcov(fit, d, order);
        ReportRow row = row_from_fit(fit, d, 0.95);
        row.method = "GLM (Se=sandwich) (Family=Poisson, link=log)";
        row.estimation = "MLE";
        row.computation = "IRLS";
        report.rows.push_back(row);
    }

    const BrmDesigns bd = brm_designs_from(d);
    BrmOptions bo;
    bo.seed = seed;
    bo.bootstrap = bootstrap;
    bo.bootstrap_ci = bootstrap > 0;
    {
        ReportRow row = brm_row(fit_brm_mle(bd, bo), d.n(), 0.95);
        row.method = "Binary Regression model";
        row.estimation = "MLE";
        row.computation = "quasi-Newton";
        report.rows.push_back(row);
    }
    {
        ReportRow row = brm_row(fit_brm_dr(bd, bo), d.n(), 0.95);
        row.method = "Binary Regression model";
        row.estimation = "DR";
        row.computation = "g-estimation";
        report.rows.push_back(row);
    }

    const FitResult ab = fit_adaptive_barrier(d, {});
    {
        ReportRow row = row_from_fit(ab, d, 0.95);
        row.method = "Logbinomial";
        row.estimation = "MLE";
        row.computation = "EM (CEM)";
        row.note = "see note [1]";
        report.rows.push_back(row);
    }
    {
        ReportRow row = row_from_fit(ab, d, 0.95);
        row.method = "Logbinomial";
        row.estimation = "MLE";
        row.computation = "AB";
        report.rows.push_back(row);
    }

    report.footnotes.push_back(
        "the EM row is computed with the adaptive-barrier fitter; both solve the "
        "same constrained maximum-likelihood problem and the published estimates "
        "coincide");
    report.footnotes.push_back(
        "binary-regression-model intervals are seeded nonparametric bootstrap "
        "percentile intervals (" + std::to_string(bootstrap) + " resamples)");
    return report;
}

}  // namespace rrreg
