#include "rrreg/tabular.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "rrreg/errors.hpp"
#include "rrreg/mathutil.hpp"

namespace rrreg {

namespace {

RatioEstimate log_interval(double point, double se_log, double level,
                           const std::string& label) {
    const double z = z_for_level(level);
    RatioEstimate est;
    est.point = point;
    est.ci_low = point * std::exp(-z * se_log);
    est.ci_high = point * std::exp(z * se_log);
    est.level = level;
    est.label = label;
    return est;
}

RatioEstimate degenerate_zero(double level, const std::string& label) {
    RatioEstimate est;
    est.point = 0.0;
    est.ci_low = 0.0;
    est.ci_high = std::numeric_limits<double>::infinity();
    est.level = level;
    est.label = label;
    est.degenerate_ci = true;
    return est;
}

}  // namespace

void TwoByTwoTable::validate() const {
    if (a < 0 || b < 0 || c < 0 || d < 0) {
        throw DomainError("2x2 table: negative cell count");
    }
    if (!(n() > 0)) {
        throw DomainError("2x2 table: total count must be positive");
    }
}

void StratifiedTables::validate() const {
    if (strata.empty()) {
        throw DomainError("stratified tables: at least one stratum required");
    }
    std::set<std::string> seen;
    for (const auto& s : strata) {
        if (!seen.insert(s.label).second) {
            throw DomainError("stratified tables: duplicate stratum label '" + s.label + "'");
        }
        s.table.validate();
    }
}

RatioEstimate risk_ratio(const TwoByTwoTable& t, double level) {
    t.validate();
    if (!(t.exposed() > 0) || !(t.unexposed() > 0)) {
        throw EstimateError("risk ratio undefined: empty exposed or unexposed margin");
    }
    if (!(t.c > 0)) {
        throw EstimateError("risk ratio undefined: no events among the unexposed");
    }
    if (t.a == 0.0) {
        // No continuity correction; report the zero estimate and flag the CI.
        return degenerate_zero(level, "risk ratio");
    }
    const double p1 = t.a / t.exposed();
    const double p0 = t.c / t.unexposed();
    const double point = p1 / p0;
    const double se = std::sqrt(1.0 / t.a - 1.0 / t.exposed() + 1.0 / t.c - 1.0 / t.unexposed());
    return log_interval(point, se, level, "risk ratio");
}

RatioEstimate odds_ratio(const TwoByTwoTable& t, double level) {
    t.validate();
    if (!(t.b > 0) || !(t.c > 0)) {
        throw EstimateError("odds ratio undefined: zero b or c cell");
    }
    if (t.a == 0.0 || t.d == 0.0) {
        // ad/bc collapses to zero; the Woolf interval is undefined.
        auto est = degenerate_zero(level, "odds ratio");
        est.point = (t.a * t.d) / (t.b * t.c);
        return est;
    }
    const double point = (t.a * t.d) / (t.b * t.c);
    const double se = std::sqrt(1.0 / t.a + 1.0 / t.b + 1.0 / t.c + 1.0 / t.d);
    return log_interval(point, se, level, "odds ratio");
}

RatioEstimate mantel_haenszel_rr(const StratifiedTables& s, double level) {
    s.validate();
    double num = 0.0, den = 0.0, var_num = 0.0;
    for (const auto& st : s.strata) {
        const auto& t = st.table;
        if (!(t.exposed() > 0) || !(t.unexposed() > 0)) {
            throw EstimateError("Mantel-Haenszel: stratum '" + st.label +
                                "' has an empty exposed or unexposed margin");
        }
        const double n = t.n();
        num += t.a * t.unexposed() / n;
        den += t.c * t.exposed() / n;
        var_num += ((t.a + t.c) * t.exposed() * t.unexposed() - t.a * t.c * n) / (n * n);
    }
    if (!(num > 0) || !(den > 0)) {
        throw EstimateError("Mantel-Haenszel: pooled numerator or denominator is zero");
    }
    const double point = num / den;
    const double se = std::sqrt(var_num / (num * den));
    return log_interval(point, se, level, "Mantel-Haenszel risk ratio");
}

double or_rr_ratio(const ApproxErrorInput& in) {
    if (!(in.p0 > 0.0 && in.p0 < 1.0)) {
        throw DomainError("or_rr_ratio: baseline prevalence must lie in (0,1)");
    }
    if (!(in.rr > 0.0)) {
        throw DomainError("or_rr_ratio: risk ratio must be positive");
    }
    if (in.p0 * in.rr >= 1.0) {
        throw DomainError("or_rr_ratio: infeasible pair, rr exceeds the 1/p0 bound");
    }
    return (1.0 - in.p0) / (1.0 - in.p0 * in.rr);
}

double rr_from_or(double odds_ratio, double p0) {
    if (!(p0 > 0.0 && p0 < 1.0)) {
        throw DomainError("rr_from_or: baseline prevalence must lie in (0,1)");
    }
    if (!(odds_ratio > 0.0)) {
        throw DomainError("rr_from_or: odds ratio must be positive");
    }
    return odds_ratio / (1.0 - p0 + odds_ratio * p0);
}

bool feasible(double p0, double rr) {
    if (!(p0 > 0.0 && p0 < 1.0)) {
        throw DomainError("feasible: baseline prevalence must lie in (0,1)");
    }
    return p0 * rr <= 1.0;
}

}  // namespace rrreg
