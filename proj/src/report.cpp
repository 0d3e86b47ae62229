#include "rrreg/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rrreg {

namespace {

nlohmann::json num_or_null(double v) {
    // non-finite values have no JSON representation; degenerate intervals
    // carry their flag separately
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}

double null_to_nan(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string f2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fg(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

nlohmann::json report_to_json(const Report& r) {
    nlohmann::json j;
    j["kind"] = "rr-report";
    j["dataset"] = r.dataset;
    j["derivation"] = r.derivation;
    j["seed"] = r.seed;
    j["footnotes"] = r.footnotes;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json jr;
        jr["method"] = row.method;
        jr["estimation"] = row.estimation;
        jr["computation"] = row.computation;
        jr["has_estimate"] = row.has_estimate;
        jr["rr"] = num_or_null(row.rr);
        jr["ci_low"] = num_or_null(row.ci_low);
        jr["ci_high"] = num_or_null(row.ci_high);
        jr["level"] = row.level;
        jr["converged"] = row.converged;
        jr["boundary"] = row.boundary;
        jr["degenerate_ci"] = row.degenerate_ci;
        jr["iterations"] = row.iterations;
        jr["loglik"] = num_or_null(row.loglik);
        jr["n_used"] = row.n_used;
        jr["note"] = row.note;
        j["rows"].push_back(jr);
    }
    return j;
}

Report report_from_json(const nlohmann::json& j) {
    Report r;
    r.dataset = j.at("dataset").get<std::string>();
    r.derivation = j.at("derivation").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.footnotes = j.at("footnotes").get<std::vector<std::string>>();
    for (const auto& jr : j.at("rows")) {
        ReportRow row;
        row.method = jr.at("method").get<std::string>();
        row.estimation = jr.at("estimation").get<std::string>();
        row.computation = jr.at("computation").get<std::string>();
        row.has_estimate = jr.at("has_estimate").get<bool>();
        row.rr = null_to_nan(jr.at("rr"));
        row.ci_low = null_to_nan(jr.at("ci_low"));
        row.ci_high = null_to_nan(jr.at("ci_high"));
        row.level = jr.at("level").get<double>();
        row.converged = jr.at("converged").get<bool>();
        row.boundary = jr.at("boundary").get<bool>();
        row.degenerate_ci = jr.at("degenerate_ci").get<bool>();
        row.iterations = jr.at("iterations").get<int>();
        row.loglik = null_to_nan(jr.at("loglik"));
        row.n_used = jr.at("n_used").get<int>();
        row.note = jr.at("note").get<std::string>();
        r.rows.push_back(row);
    }
    return r;
}

std::string render_text(const Report& r) {
    std::size_t mw = 6, ew = 10, cw = 11;
    for (const auto& row : r.rows) {
        mw = std::max(mw, row.method.size());
        ew = std::max(ew, row.estimation.size());
        cw = std::max(cw, row.computation.size());
    }
    std::ostringstream os;
    os << "dataset: " << r.dataset << "\n";
    if (!r.derivation.empty()) os << "derivation: " << r.derivation << "\n";

    os << pad("method", mw + 2) << pad("estimation", ew + 2) << pad("computation", cw + 2)
       << "risk ratio (CI)\n";
    for (const auto& row : r.rows) {
        os << pad(row.method, mw + 2) << pad(row.estimation, ew + 2)
           << pad(row.computation, cw + 2);
        if (!row.has_estimate) {
            os << "NC";
        } else {
            os << f2(row.rr);
            if (row.degenerate_ci) {
                os << " (degenerate CI)";
            } else if (!std::isnan(row.ci_low)) {
                os << " (" << f2(row.ci_low) << ", " << f2(row.ci_high) << ")";
            }
        }
        os << "  [n=" << row.n_used;
        if (!row.converged) os << ", not converged";
        if (row.boundary) os << ", boundary";
        if (!std::isnan(row.loglik)) os << ", loglik=" << fg(row.loglik);
        os << "]";
        if (!row.note.empty()) os << " " << row.note;
        os << "\n";
    }
    if (!r.footnotes.empty()) {
        os << "notes:\n";
        for (std::size_t i = 0; i < r.footnotes.size(); ++i) {
            os << "  [" << i + 1 << "] " << r.footnotes[i] << "\n";
        }
    }
    return os.str();
}

std::string format_approx_ratio(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    if (std::string(buf) == "1.00" && v != 1.0) {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
    }
    return buf;
}

std::string render_tsv(const Report& r) {
    std::ostringstream os;
    os << "method\testimation\tcomputation\trr\tci_low\tci_high\tlevel\tconverged\t"
          "boundary\tdegenerate_ci\titerations\tloglik\tn_used\tnote\n";
    for (const auto& row : r.rows) {
        os << row.method << '\t' << row.estimation << '\t' << row.computation << '\t'
           << (row.has_estimate ? fg(row.rr) : "NC") << '\t' << fg(row.ci_low) << '\t'
           << fg(row.ci_high) << '\t' << fg(row.level) << '\t' << row.converged << '\t'
           << row.boundary << '\t' << row.degenerate_ci << '\t' << row.iterations << '\t'
           << fg(row.loglik) << '\t' << row.n_used << '\t' << row.note << '\n';
    }
    return os.str();
}

}  // namespace rrreg
