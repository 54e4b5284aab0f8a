#include "uplift/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace uplift {

namespace {

constexpr const char* kTreatment = "treatment";
constexpr const char* kConversion = "conversion";
constexpr const char* kRevenue = "revenue";
constexpr const char* kTrueUplift = "true_uplift";

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        fields.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double(const std::string& field, const std::string& label, std::size_t line_no,
                    const std::string& column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw DataError(label + ":" + std::to_string(line_no) + ": cannot parse '" + field +
                        "' in column " + column);
    }
    return value;
}

int parse_flag(const std::string& field, const std::string& label, std::size_t line_no,
               const std::string& column) {
    const double value = parse_double(field, label, line_no, column);
    if (value != 0.0 && value != 1.0) {
        throw DataError(label + ":" + std::to_string(line_no) + ": column " + column +
                        " must be 0 or 1, got '" + field + "'");
    }
    return value == 1.0 ? 1 : 0;
}

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

}  // namespace

UpliftDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    return load_csv(in, path);
}

UpliftDataset load_csv(std::istream& in, const std::string& label) {
    std::string line;
    std::size_t line_no = 0;
    do {
        if (!std::getline(in, line)) throw DataError(label + ": empty input, expected a header row");
        ++line_no;
    } while (trim(line).empty());

    const std::vector<std::string> header = split_line(line);
    Index treatment_col = -1;
    Index conversion_col = -1;
    Index revenue_col = -1;
    Index uplift_col = -1;
    std::vector<Index> covariate_cols;
    std::vector<std::string> feature_names;
    for (Index j = 0; j < static_cast<Index>(header.size()); ++j) {
        const std::string& name = header[static_cast<std::size_t>(j)];
        auto claim = [&](Index& slot) {
            if (slot >= 0) throw DataError(label + ": duplicate column '" + name + "'");
            slot = j;
        };
        if (name == kTreatment) {
            claim(treatment_col);
        } else if (name == kConversion) {
            claim(conversion_col);
        } else if (name == kRevenue) {
            claim(revenue_col);
        } else if (name == kTrueUplift) {
            claim(uplift_col);
        } else if (name.empty()) {
            throw DataError(label + ": empty column name in header");
        } else {
            if (std::find(feature_names.begin(), feature_names.end(), name) != feature_names.end()) {
                throw DataError(label + ": duplicate column '" + name + "'");
            }
            covariate_cols.push_back(j);
            feature_names.push_back(name);
        }
    }
    const std::pair<Index, const char*> required[] = {
        {treatment_col, kTreatment}, {conversion_col, kConversion}, {revenue_col, kRevenue}};
    for (const auto& [slot, name] : required) {
        if (slot < 0) throw DataError(label + ": missing required column '" + std::string(name) + "'");
    }

    std::vector<std::vector<double>> covariate_rows;
    std::vector<int> treatment;
    std::vector<int> conversion;
    std::vector<double> revenue;
    std::vector<double> uplift;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size()) {
            throw DataError(label + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        auto field = [&](Index j) -> const std::string& { return fields[static_cast<std::size_t>(j)]; };
        treatment.push_back(parse_flag(field(treatment_col), label, line_no, kTreatment));
        conversion.push_back(parse_flag(field(conversion_col), label, line_no, kConversion));
        revenue.push_back(parse_double(field(revenue_col), label, line_no, kRevenue));
        if (!std::isfinite(revenue.back()) || revenue.back() < 0.0) {
            throw DataError(label + ":" + std::to_string(line_no) +
                            ": revenue must be finite and non-negative");
        }
        if (conversion.back() == 0 && revenue.back() != 0.0) {
            throw DataError(label + ":" + std::to_string(line_no) +
                            ": non-converting session has nonzero revenue");
        }
        if (uplift_col >= 0) {
            uplift.push_back(parse_double(field(uplift_col), label, line_no, kTrueUplift));
        }
        std::vector<double> row;
        row.reserve(covariate_cols.size());
        for (std::size_t k = 0; k < covariate_cols.size(); ++k) {
            row.push_back(parse_double(field(covariate_cols[k]), label, line_no, feature_names[k]));
        }
        covariate_rows.push_back(std::move(row));
    }

    const Index n = static_cast<Index>(treatment.size());
    const Index m = static_cast<Index>(covariate_cols.size());
    Matrix covariates(n, m);
    IntVector treatment_v(n);
    IntVector conversion_v(n);
    Vector revenue_v(n);
    for (Index i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        for (Index j = 0; j < m; ++j) covariates(i, j) = covariate_rows[row][static_cast<std::size_t>(j)];
        treatment_v[i] = treatment[row];
        conversion_v[i] = conversion[row];
        revenue_v[i] = revenue[row];
    }
    std::optional<Vector> uplift_v;
    if (uplift_col >= 0) {
        uplift_v.emplace(Eigen::Map<const Vector>(uplift.data(), n));
    }
    try {
        return UpliftDataset(std::move(covariates), std::move(treatment_v), std::move(conversion_v),
                             std::move(revenue_v), std::move(feature_names), std::move(uplift_v));
    } catch (const DataError& err) {
        throw DataError(label + ": " + err.what());
    }
}

void save_csv(const UpliftDataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    save_csv(dataset, out);
    if (!out) throw DataError("write to '" + path + "' failed");
}

void save_csv(const UpliftDataset& dataset, std::ostream& out) {
    for (const std::string& name : dataset.feature_names()) out << name << ',';
    out << kTreatment << ',' << kConversion << ',' << kRevenue;
    if (dataset.true_uplift()) out << ',' << kTrueUplift;
    out << '\n';
    for (Index i = 0; i < dataset.size(); ++i) {
        for (Index j = 0; j < dataset.dim(); ++j) out << format_double(dataset.covariates()(i, j)) << ',';
        out << dataset.treatment()[i] << ',' << dataset.conversion()[i] << ','
            << format_double(dataset.revenue()[i]);
        if (dataset.true_uplift()) out << ',' << format_double((*dataset.true_uplift())[i]);
        out << '\n';
    }
}

}  // namespace uplift
