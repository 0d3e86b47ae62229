#include "rrreg/barrier.hpp"

#include <cmath>
#include <limits>

#include "rrreg/errors.hpp"
#include "rrreg/logbin.hpp"

namespace rrreg {

namespace {

constexpr double kActiveSlack = 1e-8;  // -x_i'beta below this counts as active

double barrier_objective(const Eigen::VectorXd& eta, const Eigen::VectorXd& y, double mu) {
    double obj = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double u = eta[i];
        if (u >= 0.0) return -std::numeric_limits<double>::infinity();
        obj += (y[i] == 1.0) ? u : std::log(-std::expm1(u));
        obj += mu * std::log(-u);
    }
    return obj;
}

}  // namespace

FitResult fit_adaptive_barrier(const DesignMatrix& d, const BarrierOptions& opts) {
    if (!(opts.mu_factor > 0.0 && opts.mu_factor < 1.0) || !(opts.mu_min < opts.mu_init)) {
        throw DomainError("fit_adaptive_barrier: invalid mu schedule");
    }
    const Eigen::Index p = d.X.cols();
    const double n = static_cast<double>(d.X.rows());

    Eigen::VectorXd beta;
    if (opts.inner.start) {
        beta = *opts.inner.start;
        if (beta.size() != p) throw StartError("fit_adaptive_barrier: start length mismatch");
    } else {
        beta = default_start(d);
    }
    if ((d.X * beta).maxCoeff() > -opts.slack) {
        throw StartError("fit_adaptive_barrier: no strictly feasible start "
                         "(some x_i'beta is not negative)");
    }

    FitResult res;
    const double grad_tol = opts.inner.tol * std::max(1.0, n);
    bool last_stage_converged = false;

    double mu = opts.mu_init;
    for (;;) {
        // Damped Newton on l(beta) + mu * sum log(-u_i).
        bool stage_converged = false;
        for (int it = 0; it < opts.inner.max_iter; ++it) {
            const Eigen::VectorXd eta = d.X * beta;
            Eigen::VectorXd grad = score(beta, d);
            Eigen::MatrixXd hess = expected_information(beta, d);
            for (Eigen::Index i = 0; i < eta.size(); ++i) {
                const double u = eta[i];
                grad += d.X.row(i).transpose() * (mu / u);
                hess.selfadjointView<Eigen::Lower>().rankUpdate(
                    d.X.row(i).transpose(), mu / (u * u));
            }
            hess = hess.selfadjointView<Eigen::Lower>();

            if (grad.lpNorm<Eigen::Infinity>() <= grad_tol) {
                stage_converged = true;
                break;
            }

            const Eigen::VectorXd dir = spd_solve(hess, grad);
            const double slope = grad.dot(dir);
            const double obj = barrier_objective(eta, d.y, mu);

            // Newton decrement: the ascent still available along dir. Near a
            // binding constraint the raw gradient cancels two huge terms and
            // can never certify an absolute tolerance; the decrement is
            // curvature-whitened and does not suffer from that.
            if (slope <= 1e-12 * (1.0 + std::fabs(obj))) {
                stage_converged = true;
                break;
            }

            double t = 1.0;
            bool accepted = false;
            for (int h = 0; h < 60; ++h, t *= 0.5) {
                const Eigen::VectorXd cand = beta + t * dir;
                const Eigen::VectorXd eta_c = d.X * cand;
                if (eta_c.maxCoeff() > -opts.slack) continue;
                const double obj_c = barrier_objective(eta_c, d.y, mu);
                if (obj_c >= obj + 1e-4 * t * slope) {
                    beta = cand;
                    accepted = true;
                    break;
                }
            }
            ++res.iterations;
            if (!accepted) {
                // objective improvements are below double resolution; treat a
                // tiny remaining decrement as converged
                stage_converged = slope <= 1e-9 * (1.0 + std::fabs(obj));
                break;
            }
        }
        last_stage_converged = stage_converged;
        res.stage_loglik.push_back(log_likelihood(beta, d));

        if (mu <= opts.mu_min) break;
        mu = std::max(mu * opts.mu_factor, opts.mu_min);
    }

    res.beta = beta;
    const Eigen::VectorXd eta = d.X * beta;
    res.fitted_p = eta.array().exp();
    res.loglik = log_likelihood(beta, d);
    res.converged = last_stage_converged;
    res.boundary = (-eta.maxCoeff()) < kActiveSlack;
    if (!res.converged) res.note = "final barrier stage did not meet its tolerance";

    // Covariance from the expected information restricted to inactive rows.
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double u = eta[i];
        if (-u < kActiveSlack) continue;
        const double pi = std::exp(u);
        info.selfadjointView<Eigen::Lower>().rankUpdate(d.X.row(i).transpose(),
                                                         pi / (1.0 - pi));
    }
    info = info.selfadjointView<Eigen::Lower>();
    res.vcov = spd_solve(info, Eigen::MatrixXd::Identity(p, p));
    if (res.boundary) {
        res.note = res.note.empty()
                       ? "active constraint at the solution; standard errors use the "
                         "inactive rows only"
                       : res.note;
    }
    return res;
}

}  // namespace rrreg
