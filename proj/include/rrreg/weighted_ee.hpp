#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rrreg/design.hpp"
#include "rrreg/fit.hpp"

namespace rrreg {

/// Truncation order of the Maclaurin weight series; M = 0 gives the
/// Poisson score (weight identically 1).
struct WeightOrder {
    int value = 0;
    WeightOrder() = default;
    WeightOrder(int m);  // throws DomainError when m < 0
};

struct EEOptions {
    double tol = 1e-10;      // on the sup-norm of the score, scaled by n
    int max_iter = 100;
    int damping_max = 40;    // step halvings per Newton iteration
    double fd_step = 1e-6;   // finite-difference step (relative scaling)
    std::optional<Eigen::VectorXd> start;
};

/// w(p, M) = sum_{m=0}^{M} p^m, evaluated by Horner. Requires 0 <= p < 1.
double maclaurin_weight(double p, WeightOrder order);

/// Weighted score sum_i x_i (y_i - p_i) w(p_i, M) with p_i = exp(x_i'beta).
/// Polynomial weights are finite for any finite p, so feasibility is not
/// required; non-finite p_i throws NumericError.
Eigen::VectorXd ee_score(const Eigen::VectorXd& beta, const DesignMatrix& d,
                         WeightOrder order);

/// Damped Newton on ee_score with a central finite-difference Jacobian.
/// Converged when ||S||_inf < tol * n. Fitted probabilities above 1 set
/// fitted_out_of_range rather than aborting. vcov holds the model-based
/// covariance (inverse negated Jacobian); loglik is the Poisson
/// log-likelihood when M = 0 and NaN otherwise.
FitResult solve_ee(const DesignMatrix& d, WeightOrder order, const EEOptions& opts = {});

/// Robust covariance A^-1 B A^-T with A the finite-difference Jacobian of
/// ee_score at the solution and B = sum_i u_i u_i',
/// u_i = x_i (y_i - p_i) w(p_i, M). Symmetrized on output.
Eigen::MatrixXd sandwich_vcov(const FitResult& fit, const DesignMatrix& d,
                              WeightOrder order, double fd_step = 1e-6);

/// Poisson model-based covariance (sum_i x_i x_i' p_i)^-1 at the fit.
Eigen::MatrixXd poisson_model_vcov(const FitResult& fit, const DesignMatrix& d);

}  // namespace rrreg
