#pragma once

#include <Eigen/Dense>

#include "rrreg/design.hpp"
#include "rrreg/fit.hpp"

namespace rrreg {

/// Bernoulli log-likelihood of the log-link model p_i = exp(x_i'beta).
/// Any fitted p above 1 makes the point infeasible: returns -inf rather
/// than throwing. A row with y=1 and p=1 contributes zero.
double log_likelihood(const Eigen::VectorXd& beta, const DesignMatrix& d);

/// Score sum_i x_i (y_i - p_i) / (1 - p_i). Throws NumericError when some
/// p_i >= 1 (the denominator collapses there).
Eigen::VectorXd score(const Eigen::VectorXd& beta, const DesignMatrix& d);

/// (log mean(y), 0, ..., 0); throws EstimateError when mean(y) is 0 or 1.
Eigen::VectorXd default_start(const DesignMatrix& d);

/// Fisher-scoring IRLS for the log-binomial MLE. Step-halving keeps every
/// iterate strictly feasible (all x_i'beta <= -1e-12) and the
/// log-likelihood non-decreasing. Convergence requires the relative
/// log-likelihood change to fall below tol and, at an interior point, a
/// small score; stalling against the feasibility boundary is reported as
/// converged=false with boundary=true.
FitResult fit_irls(const DesignMatrix& d, const FitOptions& opts = {});

/// Expected information sum_i x_i x_i' p_i/(1-p_i) at beta.
Eigen::MatrixXd expected_information(const Eigen::VectorXd& beta, const DesignMatrix& d);

}  // namespace rrreg
