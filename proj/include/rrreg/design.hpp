#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rrreg/data_table.hpp"

namespace rrreg {

/// Model matrix with an intercept as the first column, paired with the
/// binary response. Rows with a missing outcome or term were dropped;
/// kept_row_ids maps back to the source table.
struct DesignMatrix {
    Eigen::MatrixXd X;
    std::vector<std::string> col_names;
    Eigen::VectorXd y;
    std::vector<int> kept_row_ids;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

/// Builds the design for `outcome ~ terms`: listwise deletion, categorical
/// terms expanded to treatment-coded indicators with the smallest level as
/// reference (levels ordered ascending numerically when all parse as
/// numbers, lexicographically otherwise), intercept prepended.
DesignMatrix build_design(const DataTable& dt, const std::string& outcome,
                          const std::vector<std::string>& terms);

}  // namespace rrreg
