#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrreg/data_table.hpp"
#include "rrreg/report.hpp"

namespace rrreg {

/// One model-fitting request as issued by the command line.
struct FitRequest {
    std::string data_path;
    bool nhefs_derive = false;
    std::string outcome;
    std::string exposure;
    std::vector<std::string> covariates;
    std::string method;  // mh | irls | ab | wee[:M] | poisson | fitzmaurice60 |
                         // brm-mle | brm-dr
    std::string by;      // stratifier for mh
    std::string se_kind = "sandwich";  // wee interval: sandwich | model
    std::optional<std::vector<double>> start;
    double tol = -1.0;   // <= 0 means engine default
    int max_iter = -1;
    std::uint64_t seed = 20240811;
    int bootstrap = 500;
    double level = 0.95;
};

/// Loads the CSV, derives variables when requested, builds the design and
/// runs the selected fitter. Input problems throw; model non-convergence
/// is reported in the row.
Report run_fit(const FitRequest& req);

/// The canonical seven-analysis NHEFS report (eight rows: the EM row
/// repeats the adaptive-barrier fit, as footnoted).
Report nhefs_table_report(const std::string& data_path, std::uint64_t seed,
                          int bootstrap);

/// True when every row of the report that carries an estimate converged.
bool report_all_converged(const Report& r);

}  // namespace rrreg
