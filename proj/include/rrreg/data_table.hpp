#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rrreg {

/// Column-oriented table of named numeric or categorical columns with an
/// explicit missing mask (no sentinel values). Immutable once built.
class DataTable {
  public:
    enum class ColKind { Numeric, Categorical };

    struct Column {
        ColKind kind = ColKind::Numeric;
        std::vector<double> num;        // numeric payload (valid where !missing)
        std::vector<std::string> cat;   // categorical payload (valid where !missing)
        std::vector<std::uint8_t> missing;

        std::size_t size() const {
            return kind == ColKind::Numeric ? num.size() : cat.size();
        }
    };

    DataTable() = default;

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return cols_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    bool has(const std::string& name) const;
    const Column& col(const std::string& name) const;

    /// Appends a column; all columns must share the same length.
    void add_column(const std::string& name, Column col);

    /// Re-tags an existing numeric column as categorical (level strings are
    /// the shortest exact decimal rendering of each value).
    void mark_categorical(const std::string& name);

  private:
    std::vector<std::string> names_;
    std::vector<Column> cols_;
    std::size_t n_rows_ = 0;
    int index_of(const std::string& name) const;
};

/// Loads a comma-separated file: header row, RFC 4180 quoting, "NA" or the
/// empty string as the missing marker. A column is numeric iff every
/// non-missing cell parses fully as a real number.
DataTable load_csv(const std::string& path);

/// Same parse applied to in-memory text (testing convenience).
DataTable load_csv_text(std::string_view text);

/// NHEFS derivations: incomeb = 1[income > 15], maritalb = 1[marital > 2],
/// wtb = 1[wt82_71 > median of non-missing wt82_71]; missing inputs stay
/// missing. The result is restricted to the eleven analysis columns
/// (qsmk, wtb, exercise, sex, age, race, incomeb, maritalb, school, asthma,
/// bronch) with exercise, incomeb, maritalb, sex, race, asthma and bronch
/// tagged categorical. Throws DataError if a required column is absent.
DataTable derive_nhefs(const DataTable& dt);

/// Terms of the canonical NHEFS regression, exposure first.
const std::vector<std::string>& nhefs_model_terms();

/// Documented source URL of the public NHEFS CSV (the library itself never
/// touches the network; see the fetch-nhefs CLI helper).
std::string nhefs_source_url();

}  // namespace rrreg
