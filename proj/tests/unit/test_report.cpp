#include "doctest.h"

#include <cmath>

#include "rrreg/report.hpp"

using namespace rrreg;

namespace {

Report sample_report() {
    Report r;
    r.dataset = "demo.csv";
    r.derivation = "none";
    r.seed = 11;
    ReportRow a;
    a.method = "Mantel Haenszel (Combined)";
    a.rr = 1.283451;
    a.ci_low = 1.171234;
    a.ci_high = 1.40619;
    a.n_used = 1566;
    r.rows.push_back(a);
    ReportRow b;
    b.method = "GLM (Family=binomial, link=log)";
    b.estimation = "MLE";
    b.computation = "IRLS";
    b.has_estimate = false;
    b.converged = false;
    b.n_used = 1506;
    b.note = "NC: infeasible start";
    r.rows.push_back(b);
    ReportRow c;
    c.method = "Logbinomial";
    c.estimation = "MLE";
    c.computation = "AB";
    c.rr = 1.3199;
    c.ci_low = 1.2012;
    c.ci_high = 1.4504;
    c.loglik = -1043.123456;
    c.iterations = 42;
    c.boundary = true;
    c.n_used = 1506;
    r.rows.push_back(c);
    r.footnotes.push_back("a footnote");
    return r;
}

}  // namespace

TEST_CASE("json round trip preserves the text rendering byte for byte") {
    const Report r = sample_report();
    const std::string direct = render_text(r);
    const nlohmann::json j = report_to_json(r);
    const std::string reparsed = render_text(report_from_json(nlohmann::json::parse(j.dump())));
    CHECK(direct == reparsed);
    CHECK(direct.find("1.28 (1.17, 1.41)") != std::string::npos);
    CHECK(direct.find("NC") != std::string::npos);
    CHECK(direct.find("boundary") != std::string::npos);
}

TEST_CASE("json encodes missing numbers as null") {
    Report r = sample_report();
    const nlohmann::json j = report_to_json(r);
    CHECK(j["rows"][1]["rr"].is_null());
    CHECK(j["rows"][0]["rr"].is_number());
    const Report back = report_from_json(j);
    CHECK(std::isnan(back.rows[1].rr));
    CHECK(back.rows[0].rr == r.rows[0].rr);
    CHECK(back.rows[2].loglik == r.rows[2].loglik);
    CHECK(back.footnotes == r.footnotes);
}

TEST_CASE("tsv rendering is full precision") {
    const std::string tsv = render_tsv(sample_report());
    CHECK(tsv.find("1.283451") != std::string::npos);
    CHECK(tsv.find("method\testimation") != std::string::npos);
    CHECK(tsv.find("NC") != std::string::npos);
}

TEST_CASE("degenerate interval rendering") {
    Report r;
    r.dataset = "x";
    ReportRow row;
    row.method = "risk ratio";
    row.rr = 0.0;
    row.ci_low = 0.0;
    row.ci_high = std::numeric_limits<double>::infinity();
    row.degenerate_ci = true;
    row.n_used = 17;
    r.rows.push_back(row);
    const std::string text = render_text(r);
    CHECK(text.find("0.00 (degenerate CI)") != std::string::npos);
    // the round trip must survive the infinite endpoint
    const std::string again = render_text(report_from_json(report_to_json(r)));
    CHECK(text == again);
}
