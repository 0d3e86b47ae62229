#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rrreg/tabular.hpp"

namespace rrreg {

struct FitOptions {
    double tol = 1e-8;       // relative change tolerance (objective scale)
    int max_iter = 100;
    std::optional<Eigen::VectorXd> start;
    int step_halving_max = 20;
};

/// Common result for every regression engine. `loglik` is NaN for engines
/// without a likelihood (weighted estimating equations at M > 0).
struct FitResult {
    Eigen::VectorXd beta;
    Eigen::MatrixXd vcov;
    double loglik = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = false;
    bool boundary = false;             // some fitted p within 1e-10 of 1
    Eigen::VectorXd fitted_p;
    bool fitted_out_of_range = false;  // some fitted p above 1 (EE engines)
    std::vector<double> objective_trace;  // accepted objective per iteration
    std::vector<double> stage_loglik;     // barrier engine: raw loglik per stage
    std::string note;
};

/// Wald interval for exp(beta[index]) from the stored covariance.
RatioEstimate wald_ratio(const FitResult& fit, int index, double level = 0.95);

/// Solves A x = b for symmetric positive semidefinite A, adding the pinned
/// diagonal jitter 1e-10 * trace(A)/p when the factorization is not
/// positive definite. Used for information-matrix solves everywhere.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& b);

}  // namespace rrreg
