#pragma once

#include <string>
#include <vector>

namespace rrreg {

/// Exposure-by-outcome cross tabulation.
///   a: Y=1, X=1    b: Y=0, X=1
///   c: Y=1, X=0    d: Y=0, X=0
/// Cells are stored as reals so that expected-count tables (exact cell
/// probabilities times a population size) are representable.
struct TwoByTwoTable {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    double n() const { return a + b + c + d; }
    double exposed() const { return a + b; }
    double unexposed() const { return c + d; }

    /// Throws DomainError unless all cells are >= 0 and the total is > 0.
    void validate() const;
};

struct Stratum {
    std::string label;
    TwoByTwoTable table;
};

struct StratifiedTables {
    std::vector<Stratum> strata;

    /// Throws DomainError unless there is at least one stratum, labels are
    /// unique and every table validates.
    void validate() const;
};

/// Point estimate with a central confidence interval.
struct RatioEstimate {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double level = 0.95;
    std::string label;
    /// Set when the interval formula is undefined (zero numerator cell);
    /// ci_low/ci_high then hold [0, inf).
    bool degenerate_ci = false;
};

/// Crude risk ratio (a/(a+b)) / (c/(c+d)) with the Katz log interval.
/// a = 0 yields point 0 with a degenerate interval; zero margins or c = 0
/// throw EstimateError.
RatioEstimate risk_ratio(const TwoByTwoTable& t, double level = 0.95);

/// Odds ratio ad/bc with the Woolf log interval. Requires b > 0 and c > 0;
/// a = 0 yields point 0 with a degenerate interval.
RatioEstimate odds_ratio(const TwoByTwoTable& t, double level = 0.95);

/// Mantel-Haenszel pooled risk ratio with the Greenland-Robins variance.
RatioEstimate mantel_haenszel_rr(const StratifiedTables& s, double level = 0.95);

/// Baseline prevalence and risk ratio pair for the OR/RR approximation
/// calculus. Valid only when p0 * rr < 1.
struct ApproxErrorInput {
    double p0 = 0.0;
    double rr = 1.0;
};

/// Relative approximation error OR/RR = (1 - p0) / (1 - p0 * rr).
double or_rr_ratio(const ApproxErrorInput& in);

/// Inverts the OR/RR relation: the risk ratio implied by an odds ratio at
/// baseline prevalence p0, i.e. or / (1 - p0 + or * p0).
double rr_from_or(double odds_ratio, double p0);

/// True iff (p0, rr) is jointly representable, i.e. p0 * rr <= 1.
bool feasible(double p0, double rr);

}  // namespace rrreg
