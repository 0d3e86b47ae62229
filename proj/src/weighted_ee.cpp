#include "rrreg/weighted_ee.hpp"

#include <cmath>
#include <limits>

#include "rrreg/errors.hpp"
#include "rrreg/logbin.hpp"

namespace rrreg {

WeightOrder::WeightOrder(int m) : value(m) {
    if (m < 0) throw DomainError("weight order must be non-negative");
}

double maclaurin_weight(double p, WeightOrder order) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw DomainError("maclaurin_weight: p must lie in [0,1)");
    }
    double w = 1.0;
    for (int m = 0; m < order.value; ++m) w = 1.0 + p * w;
    return w;
}

namespace {

// Same series without the domain restriction; the polynomial is finite for
// every finite p, which is what keeps these equations solvable where the
// likelihood score is not.
double weight_unchecked(double p, int order) {
    double w = 1.0;
    for (int m = 0; m < order; ++m) w = 1.0 + p * w;
    return w;
}

Eigen::VectorXd score_at(const Eigen::VectorXd& eta, const DesignMatrix& d, int order,
                         bool* finite) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d.X.cols());
    *finite = true;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double p = std::exp(eta[i]);
        if (!std::isfinite(p)) {
            *finite = false;
            return s;
        }
        s += d.X.row(i).transpose() * ((d.y[i] - p) * weight_unchecked(p, order));
    }
    if (!s.allFinite()) *finite = false;
    return s;
}

// Central finite differences with relative step scaling.
Eigen::MatrixXd fd_jacobian(const Eigen::VectorXd& beta, const DesignMatrix& d,
                            int order, double fd_step) {
    const Eigen::Index p = beta.size();
    Eigen::MatrixXd J(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double h = fd_step * std::max(1.0, std::fabs(beta[j]));
        Eigen::VectorXd bp = beta, bm = beta;
        bp[j] += h;
        bm[j] -= h;
        bool ok1 = false, ok2 = false;
        const Eigen::VectorXd sp = score_at(d.X * bp, d, order, &ok1);
        const Eigen::VectorXd sm = score_at(d.X * bm, d, order, &ok2);
        if (!ok1 || !ok2) {
            throw NumericError("ee jacobian: score overflowed at a perturbed point");
        }
        J.col(j) = (sp - sm) / (2.0 * h);
    }
    return J;
}

double poisson_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        ll += y[i] * eta[i] - std::exp(eta[i]);
    }
    return ll;
}

}  // namespace

Eigen::VectorXd ee_score(const Eigen::VectorXd& beta, const DesignMatrix& d,
                         WeightOrder order) {
    if (beta.size() != d.X.cols()) throw DomainError("ee_score: beta length mismatch");
    bool finite = false;
    Eigen::VectorXd s = score_at(d.X * beta, d, order.value, &finite);
    if (!finite) throw NumericError("ee_score: fitted probability overflowed");
    return s;
}

FitResult solve_ee(const DesignMatrix& d, WeightOrder order, const EEOptions& opts) {
    const Eigen::Index p = d.X.cols();
    Eigen::VectorXd beta;
    if (opts.start) {
        beta = *opts.start;
        if (beta.size() != p) throw StartError("solve_ee: start length mismatch");
    } else {
        beta = default_start(d);
    }

    const double tol_abs = opts.tol * std::max<double>(1.0, d.X.rows());
    FitResult res;
    bool finite = false;
    Eigen::VectorXd s = score_at(d.X * beta, d, order.value, &finite);
    if (!finite) throw StartError("solve_ee: score not finite at the start");
    double snorm = s.lpNorm<Eigen::Infinity>();

    for (int it = 0; it < opts.max_iter && snorm > tol_abs; ++it) {
        Eigen::MatrixXd J;
        try {
            J = fd_jacobian(beta, d, order.value, opts.fd_step);
        } catch (const NumericError&) {
            res.note = "jacobian unavailable at the current iterate";
            break;
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        const Eigen::VectorXd dir = lu.solve(-s);
        if (!dir.allFinite()) {
            res.note = "singular jacobian";
            break;
        }

        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.damping_max; ++h, t *= 0.5) {
            const Eigen::VectorXd cand = beta + t * dir;
            bool ok = false;
            const Eigen::VectorXd s_c = score_at(d.X * cand, d, order.value, &ok);
            if (!ok) continue;
            const double n_c = s_c.lpNorm<Eigen::Infinity>();
            if (n_c < (1.0 - 1e-4 * t) * snorm) {
                beta = cand;
                s = s_c;
                snorm = n_c;
                accepted = true;
                break;
            }
        }
        res.iterations = it + 1;
        if (!accepted) {
            res.note = "damping retries exhausted";
            break;
        }
    }

    res.beta = beta;
    res.converged = snorm <= tol_abs;
    const Eigen::VectorXd eta = d.X * beta;
    res.fitted_p = eta.array().exp();
    res.fitted_out_of_range = (res.fitted_p.array() > 1.0).any();
    res.boundary = res.fitted_p.maxCoeff() > 1.0 - 1e-10;
    if (order.value == 0) res.loglik = poisson_loglik(eta, d.y);

    // Model-based covariance: inverse of the negated score Jacobian.
    try {
        const Eigen::MatrixXd J = fd_jacobian(beta, d, order.value, opts.fd_step);
        Eigen::MatrixXd A = -J;
        A = 0.5 * (A + A.transpose()).eval();
        res.vcov = spd_solve(A, Eigen::MatrixXd::Identity(p, p));
    } catch (const NumericError&) {
        res.vcov = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    }
    return res;
}

Eigen::MatrixXd sandwich_vcov(const FitResult& fit, const DesignMatrix& d,
                              WeightOrder order, double fd_step) {
    if (!fit.converged) {
        throw NumericError("sandwich_vcov: fit did not converge");
    }
    const Eigen::Index p = d.X.cols();
    const Eigen::MatrixXd A = fd_jacobian(fit.beta, d, order.value, fd_step);
    const Eigen::VectorXd eta = d.X * fit.beta;

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double pi = std::exp(eta[i]);
        const double r = (d.y[i] - pi) * weight_unchecked(pi, order.value);
        B.selfadjointView<Eigen::Lower>().rankUpdate(d.X.row(i).transpose(), r * r);
    }
    B = B.selfadjointView<Eigen::Lower>();

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    if (std::fabs(lu.determinant()) < 1e-300) {
        throw NumericError("sandwich_vcov: singular bread matrix");
    }
    const Eigen::MatrixXd Ainv_B = lu.solve(B);
    const Eigen::MatrixXd V = lu.solve(Ainv_B.transpose()).transpose();
    return 0.5 * (V + V.transpose());
}

Eigen::MatrixXd poisson_model_vcov(const FitResult& fit, const DesignMatrix& d) {
    const Eigen::Index p = d.X.cols();
    const Eigen::VectorXd eta = d.X * fit.beta;
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        info.selfadjointView<Eigen::Lower>().rankUpdate(d.X.row(i).transpose(),
                                                        std::exp(eta[i]));
    }
    info = info.selfadjointView<Eigen::Lower>();
    return spd_solve(info, Eigen::MatrixXd::Identity(p, p));
}

}  // namespace rrreg
