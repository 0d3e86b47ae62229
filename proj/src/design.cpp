#include "rrreg/design.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <set>

#include "rrreg/errors.hpp"

namespace rrreg {

namespace {

bool level_as_number(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0' && errno != ERANGE;
}

// Observed levels in reference order: ascending numeric when every level
// parses as a number, lexicographic otherwise.
std::vector<std::string> ordered_levels(const std::set<std::string>& observed) {
    std::vector<std::string> levels(observed.begin(), observed.end());
    std::vector<double> nums(levels.size());
    bool all_numeric = true;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!level_as_number(levels[i], nums[i])) {
            all_numeric = false;
            break;
        }
    }
    if (all_numeric) {
        std::vector<std::size_t> idx(levels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return nums[a] < nums[b]; });
        std::vector<std::string> out;
        out.reserve(levels.size());
        for (std::size_t i : idx) out.push_back(levels[i]);
        return out;
    }
    return levels;  // std::set already lexicographic
}

}  // namespace

DesignMatrix build_design(const DataTable& dt, const std::string& outcome,
                          const std::vector<std::string>& terms) {
    if (!dt.has(outcome)) throw DesignError("outcome column '" + outcome + "' not found");
    for (const auto& t : terms) {
        if (!dt.has(t)) throw DesignError("term column '" + t + "' not found");
    }
    const auto& ycol = dt.col(outcome);
    if (ycol.kind != DataTable::ColKind::Numeric) {
        throw DesignError("outcome '" + outcome + "' must be a numeric 0/1 column");
    }

    const std::size_t n_all = dt.n_rows();
    std::vector<int> kept;
    kept.reserve(n_all);
    for (std::size_t i = 0; i < n_all; ++i) {
        bool ok = !ycol.missing[i];
        for (const auto& t : terms) {
            if (dt.col(t).missing[i]) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(static_cast<int>(i));
    }
    if (kept.empty()) throw DesignError("empty design: every row has a missing value");

    for (int i : kept) {
        const double v = ycol.num[static_cast<std::size_t>(i)];
        if (v != 0.0 && v != 1.0) {
            throw DesignError("outcome '" + outcome + "' is not binary (saw value " +
                              std::to_string(v) + ")");
        }
    }

    // Expand terms to columns.
    struct Expanded {
        std::string name;
        std::vector<double> values;  // over kept rows
    };
    std::vector<Expanded> cols;
    for (const auto& t : terms) {
        const auto& c = dt.col(t);
        if (c.kind == DataTable::ColKind::Numeric) {
            Expanded e;
            e.name = t;
            e.values.reserve(kept.size());
            for (int i : kept) e.values.push_back(c.num[static_cast<std::size_t>(i)]);
            cols.push_back(std::move(e));
        } else {
            std::set<std::string> observed;
            for (int i : kept) observed.insert(c.cat[static_cast<std::size_t>(i)]);
            const auto levels = ordered_levels(observed);
            for (std::size_t l = 1; l < levels.size(); ++l) {
                Expanded e;
                e.name = t + "_" + levels[l];
                e.values.reserve(kept.size());
                for (int i : kept) {
                    e.values.push_back(
                        c.cat[static_cast<std::size_t>(i)] == levels[l] ? 1.0 : 0.0);
                }
                cols.push_back(std::move(e));
            }
        }
    }

    const auto n = static_cast<Eigen::Index>(kept.size());
    DesignMatrix d;
    d.kept_row_ids = kept;
    d.col_names.push_back("(intercept)");
    for (const auto& e : cols) d.col_names.push_back(e.name);
    d.X.resize(n, static_cast<Eigen::Index>(cols.size() + 1));
    d.X.col(0).setOnes();
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            d.X(i, static_cast<Eigen::Index>(j + 1)) = cols[j].values[static_cast<std::size_t>(i)];
        }
    }
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.y[i] = ycol.num[static_cast<std::size_t>(kept[static_cast<std::size_t>(i)])];
    }

    // A constant non-intercept column is collinear with the intercept.
    for (Eigen::Index j = 1; j < d.X.cols(); ++j) {
        if ((d.X.col(j).array() == d.X(0, j)).all()) {
            throw DesignError("column '" + d.col_names[static_cast<std::size_t>(j)] +
                              "' is constant after deletion (collinear with intercept)");
        }
    }
    return d;
}

}  // namespace rrreg
