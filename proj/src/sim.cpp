#include "rrreg/sim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rrreg/barrier.hpp"
#include "rrreg/brm.hpp"
#include "rrreg/design.hpp"
#include "rrreg/errors.hpp"
#include "rrreg/logbin.hpp"
#include "rrreg/mathutil.hpp"
#include "rrreg/rng.hpp"
#include "rrreg/tabular.hpp"
#include "rrreg/weighted_ee.hpp"

namespace rrreg {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double CovariateSpec::support_lo() const {
    switch (dist) {
        case Dist::Bernoulli: return 0.0;
        default: return a;
    }
}

double CovariateSpec::support_hi() const {
    switch (dist) {
        case Dist::Bernoulli: return 1.0;
        default: return b;
    }
}

void Dgp::validate() const {
    if (n < 1) throw DataError("dgp: sample size must be positive");
    const auto k = static_cast<Eigen::Index>(covariates.size());
    if (exposure_coefs.size() != k + 1) {
        throw DataError("dgp: exposure model needs intercept + one coefficient per covariate");
    }
    for (const auto& c : covariates) {
        if (c.dist != CovariateSpec::Dist::Bernoulli && !(c.a < c.b)) {
            throw DataError("dgp: covariate '" + c.name + "' has an empty support interval");
        }
        if (c.dist == CovariateSpec::Dist::Bernoulli && !(c.pi > 0.0 && c.pi < 1.0)) {
            throw DataError("dgp: bernoulli probability must lie in (0,1)");
        }
    }
    if (outcome_kind == OutcomeKind::LogBinomial) {
        if (outcome_coefs.size() != k + 2) {
            throw DataError("dgp: log-binomial truth needs intercept, exposure and covariate coefficients");
        }
        // Interval arithmetic over the covariate box and exposure in {0,1}.
        double hi = outcome_coefs[0] + std::max(0.0, outcome_coefs[1]);
        for (Eigen::Index j = 0; j < k; ++j) {
            const double cf = outcome_coefs[j + 2];
            const auto& c = covariates[static_cast<std::size_t>(j)];
            hi += cf >= 0.0 ? cf * c.support_hi() : cf * c.support_lo();
        }
        if (!(hi < 0.0)) {
            throw DataError("dgp: outcome probability can reach 1 over the covariate support");
        }
    } else {
        if (theta_coefs.size() != k + 1 || phi_coefs.size() != k + 1) {
            throw DataError("dgp: theta/phi truth needs intercept + covariate coefficients");
        }
        // The (theta, phi) parameterization is valid everywhere.
    }
}

double Dgp::true_log_rr() const {
    return outcome_kind == OutcomeKind::LogBinomial ? outcome_coefs[1] : theta_coefs[0];
}

Dgp boundary_dgp() {
    Dgp dgp;
    dgp.label = "boundary";
    dgp.n = 500;
    CovariateSpec z;
    z.name = "z";
    z.dist = CovariateSpec::Dist::Uniform;
    z.a = 0.0;
    z.b = 1.0;
    dgp.covariates.push_back(z);
    dgp.exposure_coefs = Eigen::Vector2d(0.0, 0.0);  // exposure independent of z
    dgp.outcome_kind = Dgp::OutcomeKind::LogBinomial;
    dgp.outcome_coefs.resize(3);
    dgp.outcome_coefs << std::log(0.1), std::log(1.05), std::log(9.5);
    dgp.validate();
    return dgp;
}

DataTable generate(const Dgp& dgp, std::uint64_t seed) {
    dgp.validate();
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(dgp.n);
    const std::size_t k = dgp.covariates.size();

    std::vector<std::vector<double>> z(k, std::vector<double>(n));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto& c = dgp.covariates[j];
            switch (c.dist) {
                case CovariateSpec::Dist::Bernoulli:
                    z[j][i] = rng.bernoulli(c.pi) ? 1.0 : 0.0;
                    break;
                case CovariateSpec::Dist::Uniform:
                    z[j][i] = rng.uniform(c.a, c.b);
                    break;
                case CovariateSpec::Dist::Normal:
                    z[j][i] = rng.truncated_normal(c.mu, c.sigma, c.a, c.b);
                    break;
            }
        }
        double lin = dgp.exposure_coefs[0];
        for (std::size_t j = 0; j < k; ++j) {
            lin += dgp.exposure_coefs[static_cast<Eigen::Index>(j) + 1] * z[j][i];
        }
        x[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-lin))) ? 1.0 : 0.0;

        double p;
        if (dgp.outcome_kind == Dgp::OutcomeKind::LogBinomial) {
            double u = dgp.outcome_coefs[0] + dgp.outcome_coefs[1] * x[i];
            for (std::size_t j = 0; j < k; ++j) {
                u += dgp.outcome_coefs[static_cast<Eigen::Index>(j) + 2] * z[j][i];
            }
            p = std::exp(u);
        } else {
            double th = dgp.theta_coefs[0], ph = dgp.phi_coefs[0];
            for (std::size_t j = 0; j < k; ++j) {
                th += dgp.theta_coefs[static_cast<Eigen::Index>(j) + 1] * z[j][i];
                ph += dgp.phi_coefs[static_cast<Eigen::Index>(j) + 1] * z[j][i];
            }
            const ProbPair pp = probs_from_theta_phi(th, ph);
            p = x[i] == 1.0 ? pp.p1 : pp.p0;
        }
        if (!(p > 0.0 && p < 1.0)) {
            throw NumericError("generate: outcome probability left (0,1) at a realized covariate");
        }
        y[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    }

    DataTable dt;
    auto numeric = [&](std::vector<double> v) {
        DataTable::Column col;
        col.kind = DataTable::ColKind::Numeric;
        col.missing.assign(v.size(), 0);
        col.num = std::move(v);
        return col;
    };
    for (std::size_t j = 0; j < k; ++j) dt.add_column(dgp.covariates[j].name, numeric(z[j]));
    dt.add_column("x", numeric(x));
    dt.add_column("y", numeric(y));
    return dt;
}

// ---------------------------------------------------------------------------
// study execution

namespace {

struct MethodAccum {
    std::string method;
    int attempted = 0;
    int converged = 0;
    int out_of_range = 0;
    std::vector<double> est;       // log-RR over converged reps
    std::vector<double> se;        // reported se where available
    std::vector<double> width;     // CI width on the RR scale
    int ci_total = 0;
    int ci_cover = 0;
};

struct RepEstimate {
    bool converged = false;
    bool out_of_range = false;
    double log_rr = kNaN;
    double se = kNaN;
    double ci_low = kNaN, ci_high = kNaN;  // RR scale
};

TwoByTwoTable crosstab(const DataTable& dt) {
    const auto& x = dt.col("x");
    const auto& y = dt.col("y");
    TwoByTwoTable t;
    for (std::size_t i = 0; i < dt.n_rows(); ++i) {
        const bool xi = x.num[i] == 1.0;
        const bool yi = y.num[i] == 1.0;
        if (xi && yi) t.a += 1;
        else if (xi) t.b += 1;
        else if (yi) t.c += 1;
        else t.d += 1;
    }
    return t;
}

int parse_wee_order(const std::string& method) {
    const auto pos = method.find(':');
    if (pos == std::string::npos) return 0;
    return std::stoi(method.substr(pos + 1));
}

RepEstimate run_method(const std::string& method, const DataTable& dt,
                       const DesignMatrix& design, std::uint64_t rep_seed) {
    RepEstimate r;
    if (method == "crude") {
        const RatioEstimate est = risk_ratio(crosstab(dt));
        if (est.degenerate_ci) return r;
        r.converged = true;
        r.log_rr = std::log(est.point);
        const double z = z_for_level(est.level);
        r.se = (std::log(est.ci_high) - std::log(est.ci_low)) / (2.0 * z);
        r.ci_low = est.ci_low;
        r.ci_high = est.ci_high;
        return r;
    }
    if (method == "irls" || method == "ab") {
        const FitResult fit =
            method == "irls" ? fit_irls(design) : fit_adaptive_barrier(design, {});
        r.converged = fit.converged;
        if (!fit.converged) return r;
        r.log_rr = fit.beta[1];
        r.se = std::sqrt(fit.vcov(1, 1));
        const RatioEstimate est = wald_ratio(fit, 1);
        r.ci_low = est.ci_low;
        r.ci_high = est.ci_high;
        return r;
    }
    if (method.rfind("wee", 0) == 0) {
        const WeightOrder order(parse_wee_order(method));
        const FitResult fit = solve_ee(design, order);
        r.converged = fit.converged;
        r.out_of_range = fit.fitted_out_of_range;
        if (!fit.converged) return r;
        const Eigen::MatrixXd vs = sandwich_vcov(fit, design, order);
        r.log_rr = fit.beta[1];
        r.se = std::sqrt(vs(1, 1));
        const double z = z_for_level(0.95);
        r.ci_low = std::exp(r.log_rr - z * r.se);
        r.ci_high = std::exp(r.log_rr + z * r.se);
        return r;
    }
    if (method == "brm-mle" || method == "brm-dr") {
        const Eigen::Index n = design.X.rows();
        BrmDesigns bd;
        bd.v_theta = Eigen::MatrixXd::Ones(n, 1);
        // intercept + covariates (design columns past the exposure)
        const Eigen::Index extra = design.X.cols() - 2;
        bd.v_phi.resize(n, extra + 1);
        bd.v_phi.col(0).setOnes();
        if (extra > 0) bd.v_phi.rightCols(extra) = design.X.rightCols(extra);
        bd.v_prop = bd.v_phi;
        bd.x = design.X.col(1);
        bd.y = design.y;
        BrmOptions opts;
        opts.bootstrap_ci = false;
        opts.seed = rep_seed;
        const BrmFit fit = method == "brm-mle" ? fit_brm_mle(bd, opts) : fit_brm_dr(bd, opts);
        r.converged = fit.converged;
        if (fit.converged) r.log_rr = fit.alpha[0];
        return r;
    }
    throw DataError("unknown study method '" + method + "'");
}

}  // namespace

StudyResult run_study(const Dgp& dgp, const std::vector<std::string>& methods,
                      int reps, std::uint64_t seed) {
    dgp.validate();
    if (reps < 1) throw DataError("run_study: reps must be >= 1");
    if (dgp.outcome_kind == Dgp::OutcomeKind::ThetaPhi) {
        for (Eigen::Index j = 1; j < dgp.theta_coefs.size(); ++j) {
            if (dgp.theta_coefs[j] != 0.0) {
                throw DataError("run_study: bias is defined against a constant true log-RR; "
                                "theta truth must be intercept-only");
            }
        }
    }

    const double truth = dgp.true_log_rr();
    std::vector<MethodAccum> acc;
    acc.reserve(methods.size());
    for (const auto& m : methods) {
        MethodAccum a;
        a.method = m;
        acc.push_back(a);
    }

    std::vector<std::string> terms = {"x"};
    for (const auto& c : dgp.covariates) terms.push_back(c.name);

    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t rep_seed =
            Rng::stream(seed, static_cast<std::uint64_t>(rep)).next_u64();
        const DataTable dt = generate(dgp, rep_seed);
        DesignMatrix design;
        bool design_ok = true;
        try {
            design = build_design(dt, "y", terms);
        } catch (const std::runtime_error&) {
            design_ok = false;  // e.g. degenerate draw with constant column
        }

        for (auto& a : acc) {
            a.attempted += 1;
            if (!design_ok && a.method != "crude") continue;
            RepEstimate r;
            try {
                r = run_method(a.method, dt, design, rep_seed);
            } catch (const std::runtime_error&) {
                continue;  // replicate failure is data, not an error
            }
            if (r.out_of_range) a.out_of_range += 1;
            if (!r.converged || !std::isfinite(r.log_rr)) continue;
            a.converged += 1;
            a.est.push_back(r.log_rr);
            if (std::isfinite(r.se)) a.se.push_back(r.se);
            if (std::isfinite(r.ci_low) && std::isfinite(r.ci_high)) {
                a.ci_total += 1;
                a.width.push_back(r.ci_high - r.ci_low);
                const double rr_true = std::exp(truth);
                if (r.ci_low <= rr_true && rr_true <= r.ci_high) a.ci_cover += 1;
            }
        }
    }

    StudyResult out;
    out.dgp_label = dgp.label;
    out.reps = reps;
    out.seed = seed;
    out.true_log_rr = truth;
    for (const auto& a : acc) {
        MethodSummary s;
        s.method = a.method;
        s.reps = a.attempted;
        s.convergence_rate = a.attempted ? static_cast<double>(a.converged) / a.attempted : 0.0;
        s.out_of_range_rate = a.attempted ? static_cast<double>(a.out_of_range) / a.attempted : 0.0;
        if (!a.est.empty()) {
            s.mean_bias = mean(a.est) - truth;
            double ss = 0.0;
            const double m = mean(a.est);
            for (double e : a.est) ss += (e - m) * (e - m);
            s.empirical_se = a.est.size() > 1 ? std::sqrt(ss / (a.est.size() - 1.0)) : kNaN;
        } else {
            s.mean_bias = kNaN;
            s.empirical_se = kNaN;
        }
        s.mean_est_se = a.se.empty() ? kNaN : mean(a.se);
        if (a.ci_total > 0) {
            s.coverage = static_cast<double>(a.ci_cover) / a.ci_total;
            s.coverage_mc_se = std::sqrt(s.coverage * (1.0 - s.coverage) / a.ci_total);
            s.mean_ci_width = mean(a.width);
        } else {
            s.coverage = kNaN;
            s.coverage_mc_se = kNaN;
            s.mean_ci_width = kNaN;
        }
        out.methods.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// config parsing and output

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_num_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw DataError("config: bad number '" + tok + "' in " + key);
        }
    }
    return out;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

std::string fmt_g(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

StudyConfig parse_study_config(const std::string& text) {
    StudyConfig cfg;
    bool preset_loaded = false;
    std::string section;
    CovariateSpec* cov = nullptr;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw DataError("config: unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.rfind("covariate ", 0) == 0) {
                CovariateSpec c;
                c.name = trim(section.substr(10));
                if (c.name.empty()) throw DataError("config: covariate section needs a name");
                cfg.dgp.covariates.push_back(c);
                cov = &cfg.dgp.covariates.back();
                section = "covariate";
            } else if (section != "exposure" && section != "outcome" && section != "study") {
                throw DataError("config: unknown section [" + section + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("config: expected key=value at line " + std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        auto bad_key = [&]() {
            throw DataError("config: unknown key '" + key + "' in section [" +
                            (section.empty() ? "top" : section) + "]");
        };

        if (section.empty()) {
            if (key == "label") cfg.dgp.label = val;
            else if (key == "n") cfg.dgp.n = std::stoi(val);
            else if (key == "preset") {
                if (val != "boundary") throw DataError("config: unknown preset '" + val + "'");
                cfg.dgp = boundary_dgp();
                preset_loaded = true;
            } else bad_key();
        } else if (section == "covariate") {
            if (key == "dist") {
                if (val == "bernoulli") cov->dist = CovariateSpec::Dist::Bernoulli;
                else if (val == "uniform") cov->dist = CovariateSpec::Dist::Uniform;
                else if (val == "normal") cov->dist = CovariateSpec::Dist::Normal;
                else throw DataError("config: unknown distribution '" + val + "'");
            } else if (key == "pi") cov->pi = std::stod(val);
            else if (key == "a") cov->a = std::stod(val);
            else if (key == "b") cov->b = std::stod(val);
            else if (key == "mu") cov->mu = std::stod(val);
            else if (key == "sigma") cov->sigma = std::stod(val);
            else bad_key();
        } else if (section == "exposure") {
            if (key == "coefs") cfg.dgp.exposure_coefs = to_vec(parse_num_list(val, key));
            else bad_key();
        } else if (section == "outcome") {
            if (key == "kind") {
                if (val == "logbin") cfg.dgp.outcome_kind = Dgp::OutcomeKind::LogBinomial;
                else if (val == "thetaphi") cfg.dgp.outcome_kind = Dgp::OutcomeKind::ThetaPhi;
                else throw DataError("config: unknown outcome kind '" + val + "'");
            } else if (key == "coefs") cfg.dgp.outcome_coefs = to_vec(parse_num_list(val, key));
            else if (key == "theta_coefs") cfg.dgp.theta_coefs = to_vec(parse_num_list(val, key));
            else if (key == "phi_coefs") cfg.dgp.phi_coefs = to_vec(parse_num_list(val, key));
            else bad_key();
        } else if (section == "study") {
            if (key == "reps") cfg.reps = std::stoi(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "methods") {
                cfg.methods.clear();
                std::stringstream ss(val);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    tok = trim(tok);
                    if (!tok.empty()) cfg.methods.push_back(tok);
                }
            } else bad_key();
        }
    }
    if (cfg.methods.empty()) cfg.methods = {"irls", "ab"};
    if (!preset_loaded) cfg.dgp.validate();
    return cfg;
}

std::string study_tsv(const StudyResult& r) {
    std::ostringstream os;
    os << "# dgp=" << r.dgp_label << "\tseed=" << r.seed << "\treps=" << r.reps
       << "\ttrue_log_rr=" << fmt_g(r.true_log_rr) << "\n";
    os << "method\treps\tconvergence_rate\tmean_bias\tempirical_se\tmean_est_se\t"
          "coverage\tcoverage_mc_se\tmean_ci_width\tout_of_range_rate\n";
    for (const auto& m : r.methods) {
        os << m.method << '\t' << m.reps << '\t' << fmt_g(m.convergence_rate) << '\t'
           << fmt_g(m.mean_bias) << '\t' << fmt_g(m.empirical_se) << '\t'
           << fmt_g(m.mean_est_se) << '\t' << fmt_g(m.coverage) << '\t'
           << fmt_g(m.coverage_mc_se) << '\t' << fmt_g(m.mean_ci_width) << '\t'
           << fmt_g(m.out_of_range_rate) << '\n';
    }
    return os.str();
}

std::string study_json(const StudyResult& r) {
    nlohmann::json j;
    j["dgp"] = r.dgp_label;
    j["seed"] = r.seed;
    j["reps"] = r.reps;
    j["true_log_rr"] = r.true_log_rr;
    j["methods"] = nlohmann::json::array();
    auto num = [](double v) {
        return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
    };
    for (const auto& m : r.methods) {
        nlohmann::json jm;
        jm["method"] = m.method;
        jm["reps"] = m.reps;
        jm["convergence_rate"] = m.convergence_rate;
        jm["mean_bias"] = num(m.mean_bias);
        jm["empirical_se"] = num(m.empirical_se);
        jm["mean_est_se"] = num(m.mean_est_se);
        jm["coverage"] = num(m.coverage);
        jm["coverage_mc_se"] = num(m.coverage_mc_se);
        jm["mean_ci_width"] = num(m.mean_ci_width);
        jm["out_of_range_rate"] = m.out_of_range_rate;
        j["methods"].push_back(jm);
    }
    return j.dump(2) + "\n";
}

}  // namespace rrreg
