#pragma once

#include <vector>

namespace rrreg {

/// Standard normal quantile, Wichura's AS 241 (PPND16), |error| < 1e-15.
double normal_quantile(double p);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Two-sided z multiplier for a central interval at the given level,
/// e.g. level = 0.95 -> 1.95996...
double z_for_level(double level);

double mean(const std::vector<double>& v);

/// Median with the average-two-middle-order-statistics convention.
/// The input is copied and sorted; empty input throws.
double median(std::vector<double> v);

/// Linear-interpolation sample quantile (the "type 7" convention),
/// q in [0, 1]. The input is copied and sorted.
double quantile_type7(std::vector<double> v, double q);

}  // namespace rrreg
