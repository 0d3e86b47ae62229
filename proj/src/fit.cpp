#include "rrreg/fit.hpp"

#include <cmath>

#include "rrreg/errors.hpp"
#include "rrreg/mathutil.hpp"

namespace rrreg {

RatioEstimate wald_ratio(const FitResult& fit, int index, double level) {
    if (index < 0 || index >= fit.beta.size()) {
        throw DomainError("wald_ratio: coefficient index out of range");
    }
    const double b = fit.beta[index];
    const double v = fit.vcov(index, index);
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw NumericError("wald_ratio: variance unavailable for coefficient");
    }
    const double se = std::sqrt(v);
    const double z = z_for_level(level);
    RatioEstimate est;
    est.point = std::exp(b);
    est.ci_low = std::exp(b - z * se);
    est.ci_high = std::exp(b + z * se);
    est.level = level;
    return est;
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& b) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        return ldlt.solve(b);
    }
    const double jitter =
        1e-10 * A.trace() / static_cast<double>(A.rows()) + 1e-300;
    Eigen::MatrixXd Aj = A;
    Aj.diagonal().array() += jitter;
    Eigen::LDLT<Eigen::MatrixXd> retry(Aj);
    if (retry.info() != Eigen::Success) {
        throw NumericError("spd_solve: matrix not factorizable even with jitter");
    }
    return retry.solve(b);
}

}  // namespace rrreg
