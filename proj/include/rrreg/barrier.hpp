#pragma once

#include "rrreg/design.hpp"
#include "rrreg/fit.hpp"

namespace rrreg {

struct BarrierOptions {
    double mu_init = 1.0;    // initial barrier weight
    double mu_factor = 0.1;  // geometric shrink factor, in (0,1)
    double mu_min = 1e-8;    // final stage weight
    double slack = 1e-12;    // strict-feasibility margin on -x_i'beta
    FitOptions inner;        // per-stage damped Newton controls
};

/// Constrained log-binomial MLE over {beta : X beta <= 0} by a logarithmic
/// barrier with a geometric mu schedule: each stage maximizes
/// l(beta) + mu * sum_i log(-x_i'beta) by damped Newton, warm-starting the
/// next. Every iterate stays strictly feasible, so this converges on
/// problems where plain IRLS crawls into the boundary. boundary=true marks
/// an active constraint (-x_i'beta < 1e-8) at the solution; the covariance
/// is then the expected information over the inactive rows, with a note.
FitResult fit_adaptive_barrier(const DesignMatrix& d, const BarrierOptions& opts = {});

}  // namespace rrreg
