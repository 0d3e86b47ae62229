#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rrreg {

/// One analysis line of a report, mirroring the method / estimation /
/// computation column structure of the tabular presentation.
struct ReportRow {
    std::string method;
    std::string estimation;
    std::string computation;
    bool has_estimate = true;
    double rr = std::numeric_limits<double>::quiet_NaN();
    double ci_low = std::numeric_limits<double>::quiet_NaN();
    double ci_high = std::numeric_limits<double>::quiet_NaN();
    double level = 0.95;
    bool converged = true;
    bool boundary = false;
    bool degenerate_ci = false;
    int iterations = 0;
    double loglik = std::numeric_limits<double>::quiet_NaN();
    int n_used = 0;
    std::string note;
};

struct Report {
    std::string dataset;           // path or label of the input data
    std::string derivation;        // derivation conventions applied, if any
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
    std::vector<std::string> footnotes;
};

/// Lossless JSON form (full precision; NaN encoded as null).
nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// Fixed-width text table, ratios at 2 decimals. Rendering depends only on
/// the Report contents, so text(json(report)) == text(report) byte for byte.
std::string render_text(const Report& r);

/// Full-precision tab-separated form.
std::string render_tsv(const Report& r);

/// Rounding used for the OR/RR approximation printout: two decimals,
/// extended to four when the two-decimal form would collapse a ratio that
/// differs from one onto "1.00".
std::string format_approx_ratio(double v);

}  // namespace rrreg
