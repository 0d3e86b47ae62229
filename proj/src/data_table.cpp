#include "rrreg/data_table.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rrreg/errors.hpp"
#include "rrreg/mathutil.hpp"

namespace rrreg {

namespace {

bool is_missing_cell(const std::string& s) { return s.empty() || s == "NA"; }

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') return false;
    out = v;
    return true;
}

std::string render_level(double v) {
    char buf[32];
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%g", v);
    }
    return buf;
}

// One RFC 4180 record; handles quoted fields with embedded commas, doubled
// quotes and CRLF line ends. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        saw_any = true;
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(field);
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw DataError("csv: unterminated quoted field");
    if (!saw_any) return false;
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
    return true;
}

DataTable parse_csv(std::istream& in, const std::string& what) {
    std::vector<std::string> header;
    if (!read_record(in, header) || header.empty()) {
        throw DataError("csv: " + what + " has no header row");
    }
    std::set<std::string> seen;
    for (const auto& h : header) {
        if (!seen.insert(h).second) {
            throw DataError("csv: duplicate header '" + h + "' in " + what);
        }
    }

    const std::size_t p = header.size();
    std::vector<std::vector<std::string>> raw(p);
    std::vector<std::string> fields;
    std::size_t row = 0;
    while (read_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != p) {
            std::ostringstream os;
            os << "csv: ragged row " << row << " in " << what << " (" << fields.size()
               << " fields, header has " << p << ")";
            throw DataError(os.str());
        }
        for (std::size_t j = 0; j < p; ++j) raw[j].push_back(fields[j]);
    }

    DataTable dt;
    for (std::size_t j = 0; j < p; ++j) {
        DataTable::Column col;
        const std::size_t n = raw[j].size();
        col.missing.assign(n, 0);
        bool numeric = true;
        std::vector<double> nums(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (is_missing_cell(raw[j][i])) {
                col.missing[i] = 1;
            } else if (!parse_double(raw[j][i], nums[i])) {
                numeric = false;
                break;
            }
        }
        if (numeric) {
            col.kind = DataTable::ColKind::Numeric;
            col.num = std::move(nums);
        } else {
            col.kind = DataTable::ColKind::Categorical;
            col.cat.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (!col.missing[i]) col.cat[i] = raw[j][i];
            }
        }
        dt.add_column(header[j], std::move(col));
    }
    return dt;
}

}  // namespace

bool DataTable::has(const std::string& name) const { return index_of(name) >= 0; }

const DataTable::Column& DataTable::col(const std::string& name) const {
    const int i = index_of(name);
    if (i < 0) throw DataError("no column named '" + name + "'");
    return cols_[static_cast<std::size_t>(i)];
}

void DataTable::add_column(const std::string& name, Column col) {
    if (has(name)) throw DataError("duplicate column '" + name + "'");
    if (col.missing.size() != col.size()) {
        throw DataError("column '" + name + "': missing mask length mismatch");
    }
    if (!cols_.empty() && col.size() != n_rows_) {
        throw DataError("column '" + name + "': length differs from table");
    }
    n_rows_ = col.size();
    names_.push_back(name);
    cols_.push_back(std::move(col));
}

void DataTable::mark_categorical(const std::string& name) {
    const int i = index_of(name);
    if (i < 0) throw DataError("no column named '" + name + "'");
    Column& c = cols_[static_cast<std::size_t>(i)];
    if (c.kind == ColKind::Categorical) return;
    c.kind = ColKind::Categorical;
    c.cat.resize(c.num.size());
    for (std::size_t r = 0; r < c.num.size(); ++r) {
        if (!c.missing[r]) c.cat[r] = render_level(c.num[r]);
    }
    c.num.clear();
}

int DataTable::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

DataTable load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return parse_csv(in, path);
}

DataTable load_csv_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_csv(in, "<memory>");
}

const std::vector<std::string>& nhefs_model_terms() {
    static const std::vector<std::string> terms = {
        "qsmk",   "exercise", "sex",    "age",    "race",
        "incomeb", "maritalb", "school", "asthma", "bronch"};
    return terms;
}

std::string nhefs_source_url() {
    return "https://cdn1.sph.harvard.edu/wp-content/uploads/sites/1268/1268/20/nhefs.csv";
}

DataTable derive_nhefs(const DataTable& dt) {
    // Re-deriving an already-derived table is a no-op.
    if (dt.has("wtb") && dt.has("incomeb") && dt.has("maritalb") &&
        !dt.has("wt82_71")) {
        return dt;
    }
    static const char* required[] = {"income", "marital", "wt82_71", "qsmk",
                                     "exercise", "sex", "age", "race",
                                     "school", "asthma", "bronch"};
    for (const char* name : required) {
        if (!dt.has(name)) {
            throw DataError(std::string("nhefs derivation: required column '") + name +
                            "' is missing");
        }
    }
    const std::size_t n = dt.n_rows();

    auto numeric_col = [&](const char* name) -> const DataTable::Column& {
        const auto& c = dt.col(name);
        if (c.kind != DataTable::ColKind::Numeric) {
            throw DataError(std::string("nhefs derivation: column '") + name +
                            "' must be numeric");
        }
        return c;
    };

    auto threshold_indicator = [&](const DataTable::Column& src, double thr) {
        DataTable::Column out;
        out.kind = DataTable::ColKind::Numeric;
        out.num.assign(n, 0.0);
        out.missing.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (src.missing[i]) {
                out.missing[i] = 1;
            } else {
                out.num[i] = src.num[i] > thr ? 1.0 : 0.0;
            }
        }
        return out;
    };

    const auto& income = numeric_col("income");
    const auto& marital = numeric_col("marital");
    const auto& wt = numeric_col("wt82_71");

    std::vector<double> wt_obs;
    wt_obs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!wt.missing[i]) wt_obs.push_back(wt.num[i]);
    }
    if (wt_obs.empty()) throw DataError("nhefs derivation: wt82_71 entirely missing");
    const double wt_median = median(wt_obs);

    DataTable out;
    // Column order follows the analysis layout: exposure, outcome, covariates.
    out.add_column("qsmk", dt.col("qsmk"));
    out.add_column("wtb", threshold_indicator(wt, wt_median));
    for (const char* name : {"exercise", "sex", "age", "race"}) {
        out.add_column(name, dt.col(name));
    }
    out.add_column("incomeb", threshold_indicator(income, 15.0));
    out.add_column("maritalb", threshold_indicator(marital, 2.0));
    for (const char* name : {"school", "asthma", "bronch"}) {
        out.add_column(name, dt.col(name));
    }

    for (const char* name : {"exercise", "incomeb", "maritalb", "sex", "race",
                             "asthma", "bronch"}) {
        out.mark_categorical(name);
    }
    return out;
}

}  // namespace rrreg
