#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rrreg/data_table.hpp"

namespace rrreg {

struct CovariateSpec {
    enum class Dist { Bernoulli, Uniform, Normal };
    std::string name;
    Dist dist = Dist::Uniform;
    double pi = 0.5;                 // bernoulli success probability
    double a = 0.0, b = 1.0;         // uniform / truncation bounds
    double mu = 0.0, sigma = 1.0;    // normal parameters (truncated to [a,b])

    double support_lo() const;
    double support_hi() const;
};

/// Data-generating process: covariates, a logistic exposure model and an
/// outcome truth that is either a log-binomial coefficient vector
/// (intercept, exposure, covariates...) or a (theta, phi) coefficient pair
/// over (intercept, covariates...). Construction-time validation checks by
/// interval arithmetic that the outcome probability stays inside (0,1)
/// over the whole covariate support.
struct Dgp {
    enum class OutcomeKind { LogBinomial, ThetaPhi };

    std::string label;
    int n = 0;
    std::vector<CovariateSpec> covariates;
    Eigen::VectorXd exposure_coefs;  // intercept + one per covariate
    OutcomeKind outcome_kind = OutcomeKind::LogBinomial;
    Eigen::VectorXd outcome_coefs;   // log-binomial truth
    Eigen::VectorXd theta_coefs;     // BRM-style truth
    Eigen::VectorXd phi_coefs;

    void validate() const;
    /// exposure coefficient (log-binomial truth) or the theta intercept.
    double true_log_rr() const;
};

/// Pinned single-covariate process whose outcome probability approaches 1
/// near the top of the covariate support, exercising IRLS boundary failure
/// and barrier success. Constants were fixed after a calibration run.
Dgp boundary_dgp();

/// Draws one dataset: columns are the covariates (in declaration order),
/// then exposure "x", then outcome "y". Deterministic given the seed.
DataTable generate(const Dgp& dgp, std::uint64_t seed);

struct MethodSummary {
    std::string method;
    int reps = 0;                 // attempted replicates
    double convergence_rate = 0;  // fraction with converged == true
    double mean_bias = 0;         // mean over converged of (est - true) log-RR
    double empirical_se = 0;      // sd of estimated log-RR over converged
    double mean_est_se = 0;       // mean reported se of log-RR (NaN if none)
    double coverage = 0;          // fraction of converged CIs covering true RR
    double coverage_mc_se = 0;    // sqrt(c(1-c)/m)
    double mean_ci_width = 0;     // on the RR scale
    double out_of_range_rate = 0; // fraction flagging fitted p above 1
};

struct StudyResult {
    std::string dgp_label;
    int reps = 0;
    std::uint64_t seed = 0;
    double true_log_rr = 0;
    std::vector<MethodSummary> methods;
};

/// Runs every method on each of `reps` replicate datasets. Replicate RNG
/// streams are split from the master seed, so the generated data do not
/// depend on which methods are requested. Method names: crude, irls, ab,
/// wee:M, brm-mle, brm-dr. Replicate failures are counted, never fatal.
StudyResult run_study(const Dgp& dgp, const std::vector<std::string>& methods,
                      int reps, std::uint64_t seed);

struct StudyConfig {
    Dgp dgp;
    std::vector<std::string> methods;
    int reps = 100;
    std::uint64_t seed = 1;
};

/// Parses the line-oriented key=value study configuration (see the sample
/// files under configs/). '#' starts a comment; [covariate NAME],
/// [exposure], [outcome] and [study] open sections.
StudyConfig parse_study_config(const std::string& text);

std::string study_tsv(const StudyResult& r);
std::string study_json(const StudyResult& r);

}  // namespace rrreg
