// Command-line frontend: tabular calculators, model fitting, the NHEFS
// report and simulation studies. Exit codes: 0 success, 2 input/usage
// error, 3 model non-convergence (results still printed).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "rrreg/data_table.hpp"
#include "rrreg/driver.hpp"
#include "rrreg/errors.hpp"
#include "rrreg/report.hpp"
#include "rrreg/sim.hpp"
#include "rrreg/tabular.hpp"

#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNoConvergence = 3;

void emit_report(const rrreg::Report& report, const std::string& format) {
    if (format == "json") {
        std::cout << rrreg::report_to_json(report).dump(2) << "\n";
    } else if (format == "tsv") {
        std::cout << rrreg::render_tsv(report);
    } else {
        std::cout << rrreg::render_text(report);
    }
}

int finish(const rrreg::Report& report, const std::string& format) {
    emit_report(report, format);
    return rrreg::report_all_converged(report) ? kExitOk : kExitNoConvergence;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

int cmd_table(double a, double b, double c, double d, double level,
              const std::string& format) {
    const rrreg::TwoByTwoTable t{a, b, c, d};
    rrreg::Report report;
    report.dataset = "2x2 table";
    const rrreg::RatioEstimate rr = rrreg::risk_ratio(t, level);
    const rrreg::RatioEstimate orat = rrreg::odds_ratio(t, level);
    for (const auto* est : {&rr, &orat}) {
        rrreg::ReportRow row;
        row.method = est == &rr ? "Risk ratio (crude)" : "Odds ratio";
        row.rr = est->point;
        row.ci_low = est->ci_low;
        row.ci_high = est->ci_high;
        row.level = est->level;
        row.degenerate_ci = est->degenerate_ci;
        row.n_used = static_cast<int>(t.n());
        if (est->degenerate_ci) row.note = "zero cell; interval undefined";
        report.rows.push_back(row);
    }
    emit_report(report, format);
    return kExitOk;
}

int cmd_orerr(std::optional<double> p0, std::optional<double> rr,
              std::optional<double> odds) {
    if (!p0) throw rrreg::DataError("orerr: --p0 is required");
    if (rr && odds) throw rrreg::DataError("orerr: give either --rr or --or, not both");
    if (rr) {
        const double ratio = rrreg::or_rr_ratio({*p0, *rr});
        std::cout << "OR/RR " << rrreg::format_approx_ratio(ratio) << "\n";
        std::cout << "feasible range: rr <= 1/p0 = " << rrreg::format_approx_ratio(1.0 / *p0)
                  << "\n";
        return kExitOk;
    }
    if (odds) {
        const double implied = rrreg::rr_from_or(*odds, *p0);
        std::cout << "RR " << rrreg::format_approx_ratio(implied) << "\n";
        std::cout << "feasible range: rr <= 1/p0 = " << rrreg::format_approx_ratio(1.0 / *p0)
                  << "\n";
        return kExitOk;
    }
    throw rrreg::DataError("orerr: give --rr (forward) or --or (inversion)");
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& format) {
    std::ifstream in(config_path);
    if (!in) throw rrreg::DataError("cannot open config '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    rrreg::StudyConfig cfg = rrreg::parse_study_config(buf.str());
    if (seed) cfg.seed = *seed;
    const rrreg::StudyResult result =
        rrreg::run_study(cfg.dgp, cfg.methods, cfg.reps, cfg.seed);
    if (format == "json") {
        std::cout << rrreg::study_json(result);
    } else {
        std::cout << rrreg::study_tsv(result);
    }
    return kExitOk;
}

int cmd_fetch(const std::string& out_path, const std::string& url) {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    const std::string prefix = "https://";
    if (url.rfind(prefix, 0) != 0) {
        throw rrreg::DataError("fetch-nhefs: only https urls are supported");
    }
    const auto host_end = url.find('/', prefix.size());
    if (host_end == std::string::npos) {
        throw rrreg::DataError("fetch-nhefs: malformed url");
    }
    const std::string host = url.substr(prefix.size(), host_end - prefix.size());
    const std::string path = url.substr(host_end);
    httplib::SSLClient client(host);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(60);
    auto res = client.Get(path);
    if (!res || res->status != 200) {
        throw rrreg::DataError("fetch-nhefs: download failed (" +
                               (res ? std::to_string(res->status) : "no response") + ")");
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw rrreg::DataError("fetch-nhefs: cannot write '" + out_path + "'");
    out << res->body;
    std::cout << "wrote " << res->body.size() << " bytes to " << out_path << "\n";
    return kExitOk;
#else
    (void)out_path;
    (void)url;
    throw rrreg::DataError("fetch-nhefs: built without TLS support");
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-ratio regression toolkit"};
    app.require_subcommand(1);

    std::string format = "text";

    // table ------------------------------------------------------------
    auto* table = app.add_subcommand("table", "crude 2x2 risk and odds ratios");
    double ta = 0, tb = 0, tc = 0, td = 0, tlevel = 0.95;
    table->add_option("--a", ta, "count Y=1,X=1")->required()->check(CLI::NonNegativeNumber);
    table->add_option("--b", tb, "count Y=0,X=1")->required()->check(CLI::NonNegativeNumber);
    table->add_option("--c", tc, "count Y=1,X=0")->required()->check(CLI::NonNegativeNumber);
    table->add_option("--d", td, "count Y=0,X=0")->required()->check(CLI::NonNegativeNumber);
    table->add_option("--level", tlevel, "confidence level");
    table->add_option("--format", format, "text|json|tsv");

    // orerr ------------------------------------------------------------
    auto* orerr = app.add_subcommand("orerr", "odds-ratio / risk-ratio approximation error");
    std::optional<double> op0, orr, oor;
    orerr->add_option("--p0", op0, "baseline prevalence");
    orerr->add_option("--rr", orr, "risk ratio (forward direction)");
    orerr->add_option("--or", oor, "odds ratio (inversion)");

    // fit ----------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit one risk-ratio model to a CSV");
    rrreg::FitRequest req;
    std::string covariates_csv, start_csv;
    fit->add_option("--data", req.data_path, "input CSV")->required();
    fit->add_option("--outcome", req.outcome, "binary outcome column")->required();
    fit->add_option("--exposure", req.exposure, "binary exposure column")->required();
    fit->add_option("--covariates", covariates_csv, "comma-separated covariate columns");
    fit->add_option("--method", req.method,
                    "mh | irls | ab | wee[:M] | poisson | fitzmaurice60 | brm-mle | brm-dr")
        ->required();
    fit->add_option("--by", req.by, "stratifier for method mh");
    fit->add_option("--se", req.se_kind, "wee interval flavour: sandwich|model");
    fit->add_option("--start", start_csv, "comma-separated starting values");
    fit->add_option("--tol", req.tol, "convergence tolerance");
    fit->add_option("--max-iter", req.max_iter, "iteration limit");
    fit->add_option("--seed", req.seed, "seed for bootstrap and multistart");
    fit->add_option("--boot", req.bootstrap, "bootstrap resamples for brm (0 disables)");
    fit->add_option("--level", req.level, "confidence level");
    fit->add_flag("--nhefs", req.nhefs_derive, "apply the NHEFS variable derivations");
    fit->add_option("--format", format, "text|json|tsv");

    // nhefs-report ---------------------------------------------------------
    auto* nhefs = app.add_subcommand("nhefs-report", "run the full NHEFS analysis table");
    std::string ndata;
    std::uint64_t nseed = 20240811;
    int nboot = 500;
    nhefs->add_option("--data", ndata, "NHEFS CSV")->required();
    nhefs->add_option("--seed", nseed, "bootstrap seed");
    nhefs->add_option("--boot", nboot, "bootstrap resamples for brm rows (0 disables)");
    nhefs->add_option("--format", format, "text|json|tsv");

    // simulate -----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo study from a config");
    std::string config_path;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--config", config_path, "key=value study configuration")->required();
    sim->add_option("--seed", sim_seed, "override the configured seed");
    sim->add_option("--format", format, "tsv|json");

    // fetch-nhefs ----------------------------------------------------------
    auto* fetch = app.add_subcommand("fetch-nhefs", "download the public NHEFS CSV");
    std::string fetch_out = "nhefs.csv";
    std::string fetch_url = rrreg::nhefs_source_url();
    fetch->add_option("--out", fetch_out, "output path");
    fetch->add_option("--url", fetch_url, "source url");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (table->parsed()) return cmd_table(ta, tb, tc, td, tlevel, format);
        if (orerr->parsed()) return cmd_orerr(op0, orr, oor);
        if (fit->parsed()) {
            req.covariates = split_list(covariates_csv);
            if (!start_csv.empty()) {
                std::vector<double> s;
                for (const auto& tok : split_list(start_csv)) s.push_back(std::stod(tok));
                req.start = s;
            }
            return finish(rrreg::run_fit(req), format);
        }
        if (nhefs->parsed()) return finish(rrreg::nhefs_table_report(ndata, nseed, nboot), format);
        if (sim->parsed()) return cmd_simulate(config_path, sim_seed, format);
        if (fetch->parsed()) return cmd_fetch(fetch_out, fetch_url);
    } catch (const rrreg::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
