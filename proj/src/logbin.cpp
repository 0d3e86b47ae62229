#include "rrreg/logbin.hpp"

#include <cmath>
#include <limits>

#include "rrreg/errors.hpp"

namespace rrreg {

namespace {

constexpr double kFeasMargin = -1e-12;   // iterates keep x_i'beta <= this
constexpr double kBoundaryP = 1.0 - 1e-10;

double loglik_from_eta(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double u = eta[i];
        if (u > 0.0) return -std::numeric_limits<double>::infinity();
        if (y[i] == 1.0) {
            ll += u;
        } else {
            if (u == 0.0) return -std::numeric_limits<double>::infinity();
            ll += std::log(-std::expm1(u));  // log(1 - e^u), stable for u < 0
        }
    }
    return ll;
}

}  // namespace

double log_likelihood(const Eigen::VectorXd& beta, const DesignMatrix& d) {
    if (beta.size() != d.X.cols()) throw DomainError("log_likelihood: beta length mismatch");
    return loglik_from_eta(d.X * beta, d.y);
}

Eigen::VectorXd score(const Eigen::VectorXd& beta, const DesignMatrix& d) {
    if (beta.size() != d.X.cols()) throw DomainError("score: beta length mismatch");
    const Eigen::VectorXd eta = d.X * beta;
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d.X.cols());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double p = std::exp(eta[i]);
        if (p >= 1.0) {
            throw NumericError("score: fitted probability reached 1, score denominator is singular");
        }
        s += d.X.row(i).transpose() * ((d.y[i] - p) / (1.0 - p));
    }
    return s;
}

Eigen::MatrixXd expected_information(const Eigen::VectorXd& beta, const DesignMatrix& d) {
    const Eigen::VectorXd eta = d.X * beta;
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d.X.cols(), d.X.cols());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double p = std::exp(eta[i]);
        if (p >= 1.0) {
            throw NumericError("expected_information: fitted probability reached 1");
        }
        const double w = p / (1.0 - p);
        info.selfadjointView<Eigen::Lower>().rankUpdate(d.X.row(i).transpose(), w);
    }
    return info.selfadjointView<Eigen::Lower>();
}

Eigen::VectorXd default_start(const DesignMatrix& d) {
    const double ybar = d.y.mean();
    if (!(ybar > 0.0 && ybar < 1.0)) {
        throw EstimateError("default_start: outcome is degenerate (all zeros or all ones)");
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d.X.cols());
    b[0] = std::log(ybar);
    return b;
}

FitResult fit_irls(const DesignMatrix& d, const FitOptions& opts) {
    Eigen::VectorXd beta;
    if (opts.start) {
        beta = *opts.start;
        if (beta.size() != d.X.cols()) throw StartError("fit_irls: start length mismatch");
        if ((d.X * beta).maxCoeff() > kFeasMargin) {
            throw StartError("fit_irls: starting values are infeasible (some fitted p >= 1); "
                             "the default start uses log mean(y) for the intercept");
        }
    } else {
        beta = default_start(d);
    }

    FitResult res;
    double ll = log_likelihood(beta, d);
    res.objective_trace.push_back(ll);

    const double score_tol = std::max(1e-6, 100.0 * opts.tol);
    bool stalled = false;
    bool rel_change_met = false;

    for (int it = 0; it < opts.max_iter; ++it) {
        const Eigen::VectorXd s = score(beta, d);
        if (rel_change_met &&
            s.lpNorm<Eigen::Infinity>() <
                score_tol * (1.0 + beta.lpNorm<Eigen::Infinity>()) &&
            (d.X * beta).maxCoeff() <= std::log(kBoundaryP)) {
            res.converged = true;
            break;
        }
        const Eigen::MatrixXd info = expected_information(beta, d);
        const Eigen::VectorXd dir = spd_solve(info, s);

        double t = 1.0;
        Eigen::VectorXd cand;
        double ll_new = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int h = 0; h <= opts.step_halving_max; ++h, t *= 0.5) {
            cand = beta + t * dir;
            if ((d.X * cand).maxCoeff() > kFeasMargin) continue;
            ll_new = loglik_from_eta(d.X * cand, d.y);
            if (ll_new >= ll) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Improvements can drop below double resolution one Fisher step
            // short of the score tolerance; a tiny full step is still a
            // contraction toward the root and needs no monotonicity
            // certificate.
            cand = beta + dir;
            if (dir.lpNorm<Eigen::Infinity>() <
                    1e-6 * (1.0 + beta.lpNorm<Eigen::Infinity>()) &&
                (d.X * cand).maxCoeff() <= kFeasMargin) {
                beta = cand;
                ll = loglik_from_eta(d.X * beta, d.y);
                res.iterations = it + 1;
                rel_change_met = true;
                continue;
            }
            stalled = true;
            break;
        }

        beta = cand;
        res.iterations = it + 1;
        res.objective_trace.push_back(ll_new);
        const double delta = ll_new - ll;
        ll = ll_new;

        rel_change_met = delta < opts.tol * (std::fabs(ll) + 0.1);
        if (rel_change_met &&
            (d.X * beta).maxCoeff() > std::log(kBoundaryP)) {
            break;  // stalled against the constraint set
        }
    }

    res.beta = beta;
    const Eigen::VectorXd eta = d.X * beta;
    res.fitted_p = eta.array().exp();
    res.boundary = res.fitted_p.maxCoeff() > kBoundaryP;
    res.loglik = ll;
    const Eigen::MatrixXd vc = spd_solve(expected_information(beta, d),
                                         Eigen::MatrixXd::Identity(d.X.cols(), d.X.cols()));
    res.vcov = 0.5 * (vc + vc.transpose());
    if (stalled && !res.converged) {
        res.note = "step halving exhausted before the score vanished";
    } else if (res.boundary && !res.converged) {
        res.note = "iterates stalled at the feasibility boundary (some fitted p near 1)";
    } else if (!res.converged) {
        res.note = "iteration limit reached";
    }
    return res;
}

}  // namespace rrreg
