#pragma once

#include <stdexcept>
#include <string>

namespace rrreg {

/// Invalid mathematical domain (infeasible (p0, rr) pair, probability at a
/// boundary, non-finite input).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A tabular estimate the requested formula cannot produce (zero margin,
/// zero denominator cell, degenerate outcome vector).
struct EstimateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CSV / schema / config-file problems.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Design-matrix construction problems (non-binary outcome, empty design,
/// constant column).
struct DesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// User-supplied or default starting values unusable for the requested fit.
struct StartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure that is an error rather than a non-converged result
/// (overflowing linear predictor, singular bread matrix).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rrreg
