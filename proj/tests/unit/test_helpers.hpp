#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include "rrreg/design.hpp"
#include "rrreg/tabular.hpp"

namespace helpers {

inline std::string data_dir() { return RRREG_TEST_DATA_DIR; }

/// The real NHEFS CSV, if present: $RRREG_NHEFS, else <source>/data/nhefs.csv.
inline std::string nhefs_path_or_empty() {
    if (const char* env = std::getenv("RRREG_NHEFS")) {
        if (std::ifstream(env).good()) return env;
    }
    const std::string local = std::string(RRREG_SOURCE_DIR) + "/data/nhefs.csv";
    if (std::ifstream(local).good()) return local;
    return {};
}

/// Expands a 2x2 table to subject-level rows with design columns (1, x).
inline rrreg::DesignMatrix design_from_table(const rrreg::TwoByTwoTable& t) {
    const auto n = static_cast<Eigen::Index>(t.n());
    rrreg::DesignMatrix d;
    d.X.resize(n, 2);
    d.y.resize(n);
    Eigen::Index r = 0;
    auto fill = [&](double count, double x, double y) {
        for (int k = 0; k < static_cast<int>(count); ++k, ++r) {
            d.X(r, 0) = 1.0;
            d.X(r, 1) = x;
            d.y[r] = y;
        }
    };
    fill(t.a, 1, 1);
    fill(t.b, 1, 0);
    fill(t.c, 0, 1);
    fill(t.d, 0, 0);
    d.col_names = {"(intercept)", "x"};
    d.kept_row_ids.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < d.kept_row_ids.size(); ++i) d.kept_row_ids[i] = static_cast<int>(i);
    return d;
}

/// Bisection oracle for the inverse (theta, phi) parameterization: enforces
/// p1 = e^theta p0 exactly and bisects the log-odds-product equation on
/// p0 in (0, min(1, e^-theta)). Deliberately independent of the closed form.
inline double p0_by_bisection(double theta, double phi) {
    const double hi_cap = std::min(1.0, std::exp(-theta));
    auto g = [&](double p0) {
        const double p1 = std::exp(theta) * p0;
        return std::log(p0) + std::log(p1) - std::log1p(-p0) - std::log1p(-p1) - phi;
    };
    double lo = 0.0, hi = hi_cap;  // g -> -inf at lo, +inf at hi
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (g(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace helpers
