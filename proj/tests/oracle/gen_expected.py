#!/usr/bin/env python3
"""Regenerates tests/data/sim_small.csv and the frozen reference values used
by the C++ unit tests.

This script is the independent oracle: every estimate below is produced by
statsmodels/scipy, not by the library under test.  Run it only when the
frozen dataset needs to change; paste the printed constants into
tests/unit/expected_sim_small.hpp.
"""

import numpy as np
import statsmodels.api as sm
from scipy import optimize

HERE = __import__("os").path.dirname(__file__)
CSV = __import__("os").path.join(HERE, "..", "data", "sim_small.csv")


def make_dataset():
    rng = np.random.RandomState(20240811)
    n = 200
    z1 = rng.uniform(0.0, 1.0, n)
    z2 = (rng.uniform(size=n) < 0.4).astype(float)
    lin_x = -0.5 + 0.8 * z1 + 0.4 * z2
    x = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-lin_x))).astype(float)
    lin_y = -1.6 + 0.35 * x + 0.6 * z1 + 0.3 * z2
    p = np.exp(lin_y)
    assert p.max() < 1.0
    y = (rng.uniform(size=n) < p).astype(float)
    return y, x, z1, z2


def write_csv(y, x, z1, z2):
    with open(CSV, "w") as f:
        f.write("y,x,z1,z2\n")
        for i in range(len(y)):
            f.write("%d,%d,%.17g,%d\n" % (int(y[i]), int(x[i]), z1[i], int(z2[i])))


def fmt(v):
    if np.ndim(v) == 0:
        return "%.15g" % v
    return "{" + ", ".join("%.15g" % u for u in np.ravel(v)) + "}"


def ee_score(beta, X, y, M):
    p = np.exp(X @ beta)
    w = np.zeros_like(p)
    for m in range(M + 1):
        w += p ** m
    return X.T @ ((y - p) * w)


def probs_bisect(theta, phi):
    # root of log-odds-product(p0, e^theta*p0) = phi on (0, min(1, e^-theta))
    r = np.exp(theta)
    hi = min(1.0, np.exp(-theta))

    def g(p0):
        p1 = r * p0
        return np.log(p0 * p1 / ((1 - p0) * (1 - p1))) - phi

    lo, up = 1e-300, hi * (1 - 1e-15)
    return optimize.brentq(g, lo, up, xtol=1e-300, rtol=8.9e-16, maxiter=300)


def brm_loglik(params, Vt, Vn, x, y):
    q1 = Vt.shape[1]
    theta = Vt @ params[:q1]
    phi = Vn @ params[q1:]
    ll = 0.0
    for i in range(len(y)):
        p0 = probs_bisect(theta[i], phi[i])
        p1 = np.exp(theta[i]) * p0
        pi = p1 if x[i] == 1 else p0
        ll += y[i] * np.log(pi) + (1 - y[i]) * np.log(1 - pi)
    return ll


def main():
    y, x, z1, z2 = make_dataset()
    write_csv(y, x, z1, z2)
    n = len(y)
    X = np.column_stack([np.ones(n), x, z1, z2])

    print("// dataset: n=%d, sum y=%d, sum x=%d" % (n, y.sum(), x.sum()))

    # --- log-binomial MLE (binomial family, log link) -----------------------
    start = np.r_[np.log(y.mean()), 0, 0, 0]
    glm = sm.GLM(y, X, family=sm.families.Binomial(link=sm.families.links.Log()))
    fit = glm.fit(start_params=start, maxiter=500, tol=1e-12)
    mu = fit.fittedvalues
    score = X.T @ ((y - mu) / (1 - mu))
    print("// logbin score sup-norm at oracle optimum: %.3g" % np.abs(score).max())
    print("kLogbinBeta =", fmt(fit.params))
    print("kLogbinSe   =", fmt(fit.bse))
    print("kLogbinLoglik =", fmt(fit.llf))

    # --- Poisson (M=0) + HC0 sandwich ---------------------------------------
    pois = sm.GLM(y, X, family=sm.families.Poisson()).fit(tol=1e-12)
    pois_hc0 = sm.GLM(y, X, family=sm.families.Poisson()).fit(cov_type="HC0", tol=1e-12)
    print("kPoisBeta =", fmt(pois.params))
    print("kPoisModelSe =", fmt(pois.bse))
    print("kPoisHc0Se =", fmt(pois_hc0.bse))
    mup = pois.fittedvalues
    print("// poisson max fitted p:", "%.6f" % mup.max())

    # --- weighted EE, M = 20 (scipy root on the estimating equation) --------
    sol20 = optimize.root(lambda b: ee_score(b, X, y, 20), pois.params, tol=1e-13)
    assert sol20.success, sol20
    print("kEeM20Beta =", fmt(sol20.x))

    # --- |beta(M) - beta_MLE| over M in {0,20,40,60} -------------------------
    dist = []
    for M in (0, 20, 40, 60):
        s = optimize.root(lambda b: ee_score(b, X, y, M), fit.params, tol=1e-13)
        assert s.success
        dist.append(np.abs(s.x - fit.params).max())
    print("// |beta(M)-beta_mle|_inf over M=0,20,40,60:", ["%.6g" % d for d in dist])
    print("// non-increasing:", all(dist[i + 1] <= dist[i] + 1e-12 for i in range(3)))

    # --- logistic propensity x ~ 1 + z1 + z2 ---------------------------------
    Vp = np.column_stack([np.ones(n), z1, z2])
    logit = sm.Logit(x, Vp).fit(disp=0, tol=1e-12)
    print("kPropGamma =", fmt(logit.params))

    # --- BRM MLE: target [1,z1], nuisance [1,z1,z2] --------------------------
    Vt = np.column_stack([np.ones(n), z1])
    Vn = Vp
    best = None
    rs = np.random.RandomState(7)
    for k in range(6):
        p0 = np.zeros(5) if k == 0 else rs.normal(scale=0.3, size=5)
        r = optimize.minimize(lambda p: -brm_loglik(p, Vt, Vn, x, y), p0,
                              method="BFGS", options=dict(gtol=1e-10, maxiter=2000))
        if best is None or r.fun < best.fun:
            best = r
    print("kBrmMleAlpha =", fmt(best.x[:2]))
    print("kBrmMleEta =", fmt(best.x[2:]))
    print("kBrmMleLoglik =", fmt(-best.fun))

    # --- BRM DR root with plug-in nuisance and propensity --------------------
    eta_hat = best.x[2:]
    e_hat = 1.0 / (1.0 + np.exp(-(Vp @ logit.params)))

    def dr_eq(alpha):
        theta = Vt @ alpha
        phi = Vn @ eta_hat
        p0t = np.array([probs_bisect(theta[i], phi[i]) for i in range(n)])
        resid = y * np.exp(-x * theta) - p0t
        return Vt.T @ ((x - e_hat) * resid)

    dr = optimize.root(dr_eq, best.x[:2], tol=1e-13)
    assert dr.success, dr
    print("kBrmDrAlpha =", fmt(dr.x))

    # --- Mantel-Haenszel two-stratum frozen example --------------------------
    strata = [(12, 18, 8, 22), (20, 10, 14, 16)]
    num = sum(a * (c + d) / (a + b + c + d) for a, b, c, d in strata)
    den = sum(c * (a + b) / (a + b + c + d) for a, b, c, d in strata)
    rr = num / den
    vnum = sum(((a + c) * (a + b) * (c + d) - a * c * (a + b + c + d)) / (a + b + c + d) ** 2
               for a, b, c, d in strata)
    se = np.sqrt(vnum / (num * den))
    from scipy.stats import norm
    zq = norm.ppf(0.975)
    print("kMhRr =", fmt(rr))
    print("kMhLo =", fmt(rr * np.exp(-zq * se)), "\nkMhHi =", fmt(rr * np.exp(zq * se)))

    # --- Katz / Woolf for (1,5,1,11) -----------------------------------------
    a, b, c, d = 1.0, 5.0, 1.0, 11.0
    rr = (a / (a + b)) / (c / (c + d))
    sek = np.sqrt(1 / a - 1 / (a + b) + 1 / c - 1 / (c + d))
    print("kKatzLo =", fmt(rr * np.exp(-zq * sek)), "\nkKatzHi =", fmt(rr * np.exp(zq * sek)))
    orr = a * d / (b * c)
    sew = np.sqrt(1 / a + 1 / b + 1 / c + 1 / d)
    print("kWoolfLo =", fmt(orr * np.exp(-zq * sew)), "\nkWoolfHi =", fmt(orr * np.exp(zq * sew)))


if __name__ == "__main__":
    main()
