#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "rrreg/fit.hpp"

namespace rrreg {

/// Outcome probabilities for the two exposure arms together with their
/// complements. The complements are computed directly (not as 1 - p) so
/// that downstream log-odds arithmetic keeps full precision when a
/// probability sits near 1.
struct ProbPair {
    double p0 = 0.0;  // P(Y=1 | X=0)
    double p1 = 0.0;  // P(Y=1 | X=1)
    double q0 = 1.0;  // 1 - p0
    double q1 = 1.0;  // 1 - p1
};

/// Inverts the (log risk-ratio, log odds-product) parameterization:
/// the unique (p0, p1) in (0,1)^2 with log(p1/p0) = theta and
/// log(p0 p1 / ((1-p0)(1-p1))) = phi. Defined for every finite pair —
/// this variation independence is what removes the feasibility constraint
/// from the optimization. Non-finite input throws DomainError. For inputs
/// beyond roughly |phi| + |theta| > 36 a probability may round to exactly
/// 0 or 1 at double resolution; its stored complement stays exact.
ProbPair probs_from_theta_phi(double theta, double phi);

/// Forward map: (log(p1/p0), log(p0 p1 / ((1-p0)(1-p1)))).
/// Boundary probabilities throw DomainError.
std::pair<double, double> theta_phi_from_probs(double p0, double p1);

/// Same map using the stored complements; exact near the boundary.
std::pair<double, double> theta_phi_from_probs(const ProbPair& pp);

struct PropensityFit {
    Eigen::VectorXd gamma;
    bool converged = false;
    bool separation = false;
    int iterations = 0;
};

/// Logistic regression of the exposure on baseline covariates by Fisher
/// scoring. Diverging coefficients are reported as separation with
/// converged=false rather than thrown.
PropensityFit fit_propensity(const Eigen::VectorXd& x, const Eigen::MatrixXd& v_prop,
                             const FitOptions& opts = {});

/// Design triple for the binary regression model: target (log-RR) model,
/// nuisance (log odds-product) model and propensity model, all with
/// intercept columns, plus binary exposure and outcome.
struct BrmDesigns {
    Eigen::MatrixXd v_theta;
    Eigen::MatrixXd v_phi;
    Eigen::MatrixXd v_prop;
    Eigen::VectorXd x;
    Eigen::VectorXd y;

    void validate() const;
    int n() const { return static_cast<int>(y.size()); }
};

struct BrmOptions {
    FitOptions fit;
    int multistarts = 5;        // zero start plus seeded perturbations
    std::uint64_t seed = 20240811;
    int bootstrap = 500;        // percentile-bootstrap resamples
    bool bootstrap_ci = true;   // disable for point-only fits (simulation)
};

struct BrmFit {
    enum class Method { Mle, Dr };
    Method method = Method::Mle;
    Eigen::VectorXd alpha;  // target model coefficients
    Eigen::VectorXd eta;    // nuisance coefficients (MLE only)
    Eigen::VectorXd gamma;  // propensity coefficients (DR only)
    RatioEstimate rr;       // mean over subjects of exp(theta(v_i))
    double loglik = 0.0;    // achieved log-likelihood (MLE only)
    bool converged = false;
    int n_boot_used = 0;
    std::string note;
};

/// Joint MLE of (alpha, eta) for the Bernoulli likelihood with per-subject
/// p_i = (1-x_i) p0(v_i) + x_i p1(v_i), by BFGS ascent with multi-start.
/// Unconstrained: every (alpha, eta) is feasible.
BrmFit fit_brm_mle(const BrmDesigns& bd, const BrmOptions& opts = {});

/// Doubly robust g-estimation: solves
///   sum_i v_i (x_i - e(v_i)) (y_i exp(-x_i theta_i) - p0~(v_i)) = 0
/// in alpha, with e() from the propensity fit and p0~ from the plug-in
/// nuisance MLE. Consistent when the target model holds and either the
/// nuisance or the propensity model is correct.
BrmFit fit_brm_dr(const BrmDesigns& bd, const BrmOptions& opts = {});

}  // namespace rrreg
