#include "rrreg/brm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rrreg/errors.hpp"
#include "rrreg/mathutil.hpp"
#include "rrreg/rng.hpp"

namespace rrreg {

namespace {

// One arm of the inverse parameterization, in the scaled form
//   p = 2 A / (A + B + sqrt((A-B)^2 + 4 W)),  A = e^{-c}, B = e^{t-c},
//   W = e^{t-f-2c},  c = max(0, t, (t-f)/2)
// so no intermediate overflows; the complement uses the conjugate form when
// B < A to avoid cancellation.
void solve_arm(double t, double f, double& p, double& q) {
    const double c = std::max({0.0, t, 0.5 * (t - f)});
    const double A = std::exp(-c);
    const double B = std::exp(t - c);
    const double W = std::exp(t - f - 2.0 * c);
    const double S = std::sqrt((A - B) * (A - B) + 4.0 * W);
    const double T = A + B + S;
    p = 2.0 * A / T;
    if (B >= A) {
        q = ((B - A) + S) / T;
    } else {
        // S - (A-B) via the conjugate to dodge cancellation
        q = (4.0 * W / (S + (A - B))) / T;
    }
}

}  // namespace

ProbPair probs_from_theta_phi(double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
        throw DomainError("probs_from_theta_phi: inputs must be finite");
    }
    ProbPair pp;
    solve_arm(theta, phi, pp.p0, pp.q0);
    solve_arm(-theta, phi, pp.p1, pp.q1);
    return pp;
}

std::pair<double, double> theta_phi_from_probs(double p0, double p1) {
    if (!(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0)) {
        throw DomainError("theta_phi_from_probs: probabilities must lie strictly in (0,1)");
    }
    ProbPair pp{p0, p1, 1.0 - p0, 1.0 - p1};
    return theta_phi_from_probs(pp);
}

std::pair<double, double> theta_phi_from_probs(const ProbPair& pp) {
    const double theta = std::log(pp.p1) - std::log(pp.p0);
    const double phi =
        std::log(pp.p0) + std::log(pp.p1) - std::log(pp.q0) - std::log(pp.q1);
    return {theta, phi};
}

void BrmDesigns::validate() const {
    const Eigen::Index n = y.size();
    if (x.size() != n || v_theta.rows() != n || v_phi.rows() != n || v_prop.rows() != n) {
        throw DesignError("brm designs: row counts differ");
    }
    if (n == 0) throw DesignError("brm designs: empty");
    for (Eigen::Index i = 0; i < n; ++i) {
        if ((x[i] != 0.0 && x[i] != 1.0) || (y[i] != 0.0 && y[i] != 1.0)) {
            throw DesignError("brm designs: exposure and outcome must be 0/1");
        }
    }
    for (const auto* m : {&v_theta, &v_phi, &v_prop}) {
        if (m->cols() < 1 || (m->col(0).array() != 1.0).any()) {
            throw DesignError("brm designs: every model matrix needs a leading intercept column");
        }
    }
}

// ---------------------------------------------------------------------------
// propensity: logistic regression by Fisher scoring

PropensityFit fit_propensity(const Eigen::VectorXd& x, const Eigen::MatrixXd& v_prop,
                             const FitOptions& opts) {
    const Eigen::Index n = x.size();
    const Eigen::Index q = v_prop.cols();
    if (v_prop.rows() != n) throw DesignError("fit_propensity: row count mismatch");
    if ((x.array() == x[0]).all()) {
        throw DesignError("fit_propensity: exposure is constant");
    }

    PropensityFit fit;
    Eigen::VectorXd g = opts.start ? *opts.start : Eigen::VectorXd::Zero(q);
    if (g.size() != q) throw StartError("fit_propensity: start length mismatch");

    auto loglik = [&](const Eigen::VectorXd& gamma) {
        const Eigen::VectorXd eta = v_prop * gamma;
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            // y*eta - log(1+e^eta), stable in both tails
            ll += x[i] * eta[i] - (eta[i] > 0 ? eta[i] + std::log1p(std::exp(-eta[i]))
                                              : std::log1p(std::exp(eta[i])));
        }
        return ll;
    };

    double ll = loglik(g);
    for (int it = 0; it < opts.max_iter; ++it) {
        const Eigen::VectorXd eta = v_prop * g;
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(q);
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(q, q);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = 1.0 / (1.0 + std::exp(-eta[i]));
            grad += v_prop.row(i).transpose() * (x[i] - e);
            info.selfadjointView<Eigen::Lower>().rankUpdate(v_prop.row(i).transpose(),
                                                            std::max(e * (1.0 - e), 1e-12));
        }
        info = info.selfadjointView<Eigen::Lower>();
        const Eigen::VectorXd dir = spd_solve(info, grad);

        double t = 1.0;
        double ll_new = ll;
        Eigen::VectorXd cand = g;
        for (int h = 0; h <= opts.step_halving_max; ++h, t *= 0.5) {
            cand = g + t * dir;
            ll_new = loglik(cand);
            if (ll_new >= ll) break;
        }
        g = cand;
        fit.iterations = it + 1;

        if (g.lpNorm<Eigen::Infinity>() > 30.0) {
            fit.separation = true;
            break;
        }
        const double delta = ll_new - ll;
        ll = ll_new;
        if (std::fabs(delta) < opts.tol * (std::fabs(ll) + 0.1) &&
            grad.lpNorm<Eigen::Infinity>() < 1e-6 * n) {
            fit.converged = true;
            break;
        }
    }
    fit.gamma = g;
    return fit;
}

// ---------------------------------------------------------------------------
// BRM likelihood machinery

namespace {

struct LoglikGrad {
    double loglik;
    Eigen::VectorXd grad;  // stacked (alpha, eta)
};

double brm_loglik_only(const Eigen::VectorXd& psi, const BrmDesigns& bd) {
    const Eigen::Index q1 = bd.v_theta.cols();
    const Eigen::VectorXd theta = bd.v_theta * psi.head(q1);
    const Eigen::VectorXd phi = bd.v_phi * psi.tail(bd.v_phi.cols());
    double ll = 0.0;
    for (Eigen::Index i = 0; i < bd.y.size(); ++i) {
        const ProbPair pp = probs_from_theta_phi(theta[i], phi[i]);
        const bool exposed = bd.x[i] == 1.0;
        const double p = exposed ? pp.p1 : pp.p0;
        const double q = exposed ? pp.q1 : pp.q0;
        ll += bd.y[i] == 1.0 ? std::log(p) : std::log(q);
    }
    return ll;
}

LoglikGrad brm_loglik_grad(const Eigen::VectorXd& psi, const BrmDesigns& bd,
                           bool want_grad) {
    const Eigen::Index q1 = bd.v_theta.cols();
    const Eigen::Index q2 = bd.v_phi.cols();
    const Eigen::VectorXd theta = bd.v_theta * psi.head(q1);
    const Eigen::VectorXd phi = bd.v_phi * psi.tail(q2);

    LoglikGrad out;
    out.loglik = 0.0;
    if (want_grad) out.grad = Eigen::VectorXd::Zero(q1 + q2);
    for (Eigen::Index i = 0; i < bd.y.size(); ++i) {
        const ProbPair pp = probs_from_theta_phi(theta[i], phi[i]);
        const bool exposed = bd.x[i] == 1.0;
        const double p = exposed ? pp.p1 : pp.p0;
        const double q = exposed ? pp.q1 : pp.q0;
        out.loglik += bd.y[i] == 1.0 ? std::log(p) : std::log(q);

        if (want_grad) {
            // d p0/d theta = -p0 q0/(q0+q1); d p0/d phi = p0 q0 q1/(q0+q1);
            // d p1/d theta =  p1 q1/(q0+q1); d p1/d phi = p1 q0 q1/(q0+q1).
            const double denom = pp.q0 + pp.q1;
            const double resid = (bd.y[i] - p);  // over p*q after division below
            const double common = resid / (p * q);
            double dtheta, dphi;
            if (exposed) {
                dtheta = common * (pp.p1 * pp.q1 / denom);
                dphi = common * (pp.p1 * pp.q0 * pp.q1 / denom);
            } else {
                dtheta = common * (-pp.p0 * pp.q0 / denom);
                dphi = common * (pp.p0 * pp.q0 * pp.q1 / denom);
            }
            out.grad.head(q1) += bd.v_theta.row(i).transpose() * dtheta;
            out.grad.tail(q2) += bd.v_phi.row(i).transpose() * dphi;
        }
    }
    return out;
}

struct BfgsResult {
    Eigen::VectorXd psi;
    double loglik = -std::numeric_limits<double>::infinity();
    bool converged = false;
};

// BFGS ascent with Armijo backtracking on the negated objective.
BfgsResult bfgs_maximize(const Eigen::VectorXd& psi0, const BrmDesigns& bd,
                         double grad_tol, int max_iter) {
    const Eigen::Index dim = psi0.size();
    BfgsResult best;
    Eigen::VectorXd psi = psi0;
    LoglikGrad cur = brm_loglik_grad(psi, bd, true);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(dim, dim);
    int stagnant = 0;

    for (int it = 0; it < max_iter; ++it) {
        if (cur.grad.lpNorm<Eigen::Infinity>() <= grad_tol) {
            best.converged = true;
            break;
        }
        Eigen::VectorXd dir = H * cur.grad;
        double slope = cur.grad.dot(dir);
        if (!(slope > 0.0) || !dir.allFinite()) {
            H.setIdentity();
            dir = cur.grad;
            slope = cur.grad.squaredNorm();
        }

        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd psi_new;
        double ll_new = 0.0;
        for (int h = 0; h < 60; ++h, t *= 0.5) {
            psi_new = psi + t * dir;
            ll_new = brm_loglik_only(psi_new, bd);
            if (std::isfinite(ll_new) && ll_new >= cur.loglik + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // step improvements no longer representable; a tiny remaining
            // decrement along the quasi-Newton direction counts as converged
            best.converged = slope <= 1e-8 * (1.0 + std::fabs(cur.loglik));
            break;
        }
        // exponential-tail plateaus admit endless sub-resolution progress
        stagnant = ll_new - cur.loglik < 1e-11 * (1.0 + std::fabs(cur.loglik))
                       ? stagnant + 1
                       : 0;

        const LoglikGrad nxt = brm_loglik_grad(psi_new, bd, true);
        const Eigen::VectorXd s = psi_new - psi;
        const Eigen::VectorXd yv = cur.grad - nxt.grad;  // gradient of -l changes sign
        const double sy = s.dot(yv);
        if (sy > 1e-10 * s.norm() * yv.norm()) {
            const Eigen::VectorXd Hy = H * yv;
            const double yHy = yv.dot(Hy);
            H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
                 (Hy * s.transpose() + s * Hy.transpose()) / sy;
        }
        psi = psi_new;
        cur = nxt;
        if (stagnant >= 10) break;
    }
    best.psi = psi;
    best.loglik = cur.loglik;
    if (cur.grad.lpNorm<Eigen::Infinity>() <= grad_tol) best.converged = true;
    return best;
}

struct MleCore {
    Eigen::VectorXd psi;
    double loglik = -std::numeric_limits<double>::infinity();
    bool converged = false;
};

MleCore mle_core(const BrmDesigns& bd, const BrmOptions& opts,
                 const Eigen::VectorXd* warm) {
    const Eigen::Index dim = bd.v_theta.cols() + bd.v_phi.cols();
    const double grad_tol = opts.fit.tol * std::max<double>(1.0, bd.y.size());

    std::vector<Eigen::VectorXd> starts;
    if (warm) {
        starts.push_back(*warm);
    } else {
        starts.push_back(opts.fit.start ? *opts.fit.start : Eigen::VectorXd::Zero(dim));
        Rng rng = Rng::stream(opts.seed, 17);
        for (int k = 1; k < std::max(1, opts.multistarts); ++k) {
            Eigen::VectorXd s(dim);
            for (Eigen::Index j = 0; j < dim; ++j) s[j] = 0.5 * rng.normal();
            starts.push_back(s);
        }
    }

    MleCore out;
    for (const auto& s0 : starts) {
        const BfgsResult r = bfgs_maximize(s0, bd, grad_tol, opts.fit.max_iter * 10);
        if (r.loglik > out.loglik) {
            out.psi = r.psi;
            out.loglik = r.loglik;
            out.converged = r.converged;
        }
    }
    return out;
}

double mean_rr(const Eigen::MatrixXd& v_theta, const Eigen::VectorXd& alpha) {
    return (v_theta * alpha).array().exp().mean();
}

// ---------------------------------------------------------------------------
// DR estimating equation

Eigen::VectorXd dr_equation(const Eigen::VectorXd& alpha, const BrmDesigns& bd,
                            const Eigen::VectorXd& eta_hat, const Eigen::VectorXd& e_hat) {
    const Eigen::VectorXd theta = bd.v_theta * alpha;
    const Eigen::VectorXd phi = bd.v_phi * eta_hat;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(bd.v_theta.cols());
    for (Eigen::Index i = 0; i < bd.y.size(); ++i) {
        const double p0t = probs_from_theta_phi(theta[i], phi[i]).p0;
        const double resid = bd.y[i] * std::exp(-bd.x[i] * theta[i]) - p0t;
        u += bd.v_theta.row(i).transpose() * ((bd.x[i] - e_hat[i]) * resid);
    }
    return u;
}

struct DrCore {
    Eigen::VectorXd alpha;
    bool converged = false;
};

DrCore dr_core(const BrmDesigns& bd, const Eigen::VectorXd& eta_hat,
               const Eigen::VectorXd& e_hat, const BrmOptions& opts,
               const std::vector<Eigen::VectorXd>& starts) {
    const Eigen::Index q1 = bd.v_theta.cols();
    const double tol_abs = opts.fit.tol * std::max<double>(1.0, bd.y.size());
    DrCore out;

    for (const auto& a0 : starts) {
        Eigen::VectorXd a = a0;
        Eigen::VectorXd u = dr_equation(a, bd, eta_hat, e_hat);
        double unorm = u.lpNorm<Eigen::Infinity>();
        bool ok = true;
        for (int it = 0; it < opts.fit.max_iter && unorm > tol_abs; ++it) {
            Eigen::MatrixXd J(q1, q1);
            for (Eigen::Index j = 0; j < q1; ++j) {
                const double h = 1e-6 * std::max(1.0, std::fabs(a[j]));
                Eigen::VectorXd ap = a, am = a;
                ap[j] += h;
                am[j] -= h;
                J.col(j) = (dr_equation(ap, bd, eta_hat, e_hat) -
                            dr_equation(am, bd, eta_hat, e_hat)) /
                           (2.0 * h);
            }
            const Eigen::VectorXd dir = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-u);
            if (!dir.allFinite()) {
                ok = false;
                break;
            }
            double t = 1.0;
            bool accepted = false;
            for (int h = 0; h <= 40; ++h, t *= 0.5) {
                const Eigen::VectorXd cand = a + t * dir;
                const Eigen::VectorXd uc = dr_equation(cand, bd, eta_hat, e_hat);
                if (uc.allFinite() && uc.lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * t) * unorm) {
                    a = cand;
                    u = uc;
                    unorm = u.lpNorm<Eigen::Infinity>();
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                ok = false;
                break;
            }
        }
        if (ok && unorm <= tol_abs) {
            out.alpha = a;
            out.converged = true;
            return out;
        }
        if (out.alpha.size() == 0) out.alpha = a;
    }
    return out;
}

BrmDesigns resample(const BrmDesigns& bd, Rng& rng) {
    const Eigen::Index n = bd.y.size();
    BrmDesigns r;
    r.v_theta.resize(n, bd.v_theta.cols());
    r.v_phi.resize(n, bd.v_phi.cols());
    r.v_prop.resize(n, bd.v_prop.cols());
    r.x.resize(n);
    r.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n));
        const Eigen::Index j = std::min(k, n - 1);
        r.v_theta.row(i) = bd.v_theta.row(j);
        r.v_phi.row(i) = bd.v_phi.row(j);
        r.v_prop.row(i) = bd.v_prop.row(j);
        r.x[i] = bd.x[j];
        r.y[i] = bd.y[j];
    }
    return r;
}

RatioEstimate percentile_interval(double point, std::vector<double>& draws, double level) {
    RatioEstimate est;
    est.point = point;
    est.level = level;
    if (draws.size() >= 20) {
        est.ci_low = quantile_type7(draws, (1.0 - level) / 2.0);
        est.ci_high = quantile_type7(draws, 1.0 - (1.0 - level) / 2.0);
        est.label = "bootstrap percentile";
    } else {
        est.ci_low = est.ci_high = std::numeric_limits<double>::quiet_NaN();
        est.degenerate_ci = true;
        est.label = "no interval";
    }
    return est;
}

}  // namespace

BrmFit fit_brm_mle(const BrmDesigns& bd, const BrmOptions& opts) {
    bd.validate();
    const Eigen::Index q1 = bd.v_theta.cols();

    const MleCore core = mle_core(bd, opts, nullptr);
    BrmFit fit;
    fit.method = BrmFit::Method::Mle;
    fit.alpha = core.psi.head(q1);
    fit.eta = core.psi.tail(bd.v_phi.cols());
    fit.loglik = core.loglik;
    fit.converged = core.converged;
    if (!fit.converged) fit.note = "no start reached the gradient tolerance";

    const double point = mean_rr(bd.v_theta, fit.alpha);
    std::vector<double> boot;
    if (opts.bootstrap_ci && fit.converged) {
        boot.reserve(opts.bootstrap);
        for (int b = 0; b < opts.bootstrap; ++b) {
            Rng rng = Rng::stream(opts.seed, 1000 + static_cast<std::uint64_t>(b));
            const BrmDesigns rb = resample(bd, rng);
            const MleCore rc = mle_core(rb, opts, &core.psi);
            if (rc.converged) boot.push_back(mean_rr(rb.v_theta, rc.psi.head(q1)));
        }
        fit.n_boot_used = static_cast<int>(boot.size());
    }
    fit.rr = percentile_interval(point, boot, 0.95);
    return fit;
}

BrmFit fit_brm_dr(const BrmDesigns& bd, const BrmOptions& opts) {
    bd.validate();
    const Eigen::Index q1 = bd.v_theta.cols();
    BrmFit fit;
    fit.method = BrmFit::Method::Dr;

    const PropensityFit prop = fit_propensity(bd.x, bd.v_prop, opts.fit);
    fit.gamma = prop.gamma;
    if (!prop.converged) {
        fit.note = prop.separation ? "propensity model separated"
                                   : "propensity fit did not converge";
        fit.alpha = Eigen::VectorXd::Zero(q1);
        fit.rr.point = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const Eigen::VectorXd e_hat =
        (1.0 / (1.0 + (-(bd.v_prop * prop.gamma)).array().exp())).matrix();

    BrmOptions inner = opts;
    inner.bootstrap_ci = false;
    const MleCore mle = mle_core(bd, inner, nullptr);
    const Eigen::VectorXd eta_hat = mle.psi.tail(bd.v_phi.cols());

    std::vector<Eigen::VectorXd> starts = {mle.psi.head(q1), Eigen::VectorXd::Zero(q1)};
    const DrCore core = dr_core(bd, eta_hat, e_hat, opts, starts);
    fit.alpha = core.alpha;
    fit.converged = core.converged;
    if (!fit.converged) fit.note = "g-estimation Newton failed from every start";

    const double point = mean_rr(bd.v_theta, fit.alpha);
    std::vector<double> boot;
    if (opts.bootstrap_ci && fit.converged) {
        boot.reserve(opts.bootstrap);
        for (int b = 0; b < opts.bootstrap; ++b) {
            Rng rng = Rng::stream(opts.seed, 500000 + static_cast<std::uint64_t>(b));
            const BrmDesigns rb = resample(bd, rng);
            const PropensityFit pb = fit_propensity(rb.x, rb.v_prop, opts.fit);
            if (!pb.converged) continue;
            const Eigen::VectorXd eb =
                (1.0 / (1.0 + (-(rb.v_prop * pb.gamma)).array().exp())).matrix();
            const MleCore mb = mle_core(rb, inner, &mle.psi);
            if (!mb.converged) continue;
            std::vector<Eigen::VectorXd> bs = {core.alpha, mb.psi.head(q1)};
            const DrCore db = dr_core(rb, mb.psi.tail(rb.v_phi.cols()), eb, opts, bs);
            if (db.converged) boot.push_back(mean_rr(rb.v_theta, db.alpha));
        }
        fit.n_boot_used = static_cast<int>(boot.size());
    }
    fit.rr = percentile_interval(point, boot, 0.95);
    return fit;
}

}  // namespace rrreg
