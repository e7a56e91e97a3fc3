#include "tabaug/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tabaug/errors.hpp"
#include "tabaug/rng.hpp"

namespace tabaug {

std::vector<DatasetDescriptor> registry() {
    std::vector<DatasetDescriptor> out;
    out.push_back({"australian", "australian.dat", 690, 14, 14,
                   /*comma=*/false, LabelColumn::last, 1.0,
                   "Statlog Australian Credit Approval; class 0/1 in the last column"});
    out.push_back({"german", "german.data-numeric", 1000, 24, 20,
                   /*comma=*/false, LabelColumn::last, 2.0,
                   "Statlog German Credit, numeric encoding (24 columns; the source table "
                   "reports 20 raw attributes); class 1=good 2=bad, bad mapped to 1"});
    out.push_back({"pima", "pima-indians-diabetes.csv", 768, 8, 8,
                   /*comma=*/true, LabelColumn::last, 1.0,
                   "Pima Indians Diabetes; class 0/1 in the last column"});
    out.push_back({"spect", "spect.csv", 267, 22, 22,
                   /*comma=*/true, LabelColumn::first, 1.0,
                   "SPECT heart, SPECT.train followed by SPECT.test; diagnosis 0/1 in the "
                   "first column"});
    return out;
}

const DatasetDescriptor& descriptor_by_name(const std::string& name) {
    static const std::vector<DatasetDescriptor> descriptors = registry();
    for (const auto& d : descriptors) {
        if (d.name == name) return d;
    }
    throw DataError("unknown dataset name: " + name +
                    " (registry: australian, german, pima, spect)");
}

namespace {

std::vector<std::string> tokenize(const std::string& line, bool comma) {
    std::vector<std::string> tokens;
    if (comma) {
        std::string token;
        std::istringstream ss(line);
        while (std::getline(ss, token, ',')) tokens.push_back(token);
        if (!line.empty() && line.back() == ',') tokens.emplace_back();
    } else {
        std::istringstream ss(line);
        std::string token;
        while (ss >> token) tokens.push_back(token);
    }
    return tokens;
}

double parse_cell(const std::string& token, std::size_t row, std::size_t col) {
    std::string trimmed = token;
    trimmed.erase(trimmed.begin(),
                  std::find_if(trimmed.begin(), trimmed.end(),
                               [](unsigned char c) { return !std::isspace(c); }));
    trimmed.erase(std::find_if(trimmed.rbegin(), trimmed.rend(),
                               [](unsigned char c) { return !std::isspace(c); })
                      .base(),
                  trimmed.end());
    try {
        std::size_t used = 0;
        const double v = std::stod(trimmed, &used);
        if (used != trimmed.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw DataError("unparseable cell at row " + std::to_string(row + 1) + ", column " +
                        std::to_string(col + 1) + ": '" + token + "'");
    }
}

struct RawTable {
    std::vector<std::vector<double>> rows;
    std::string fingerprint;
};

RawTable read_table(const std::filesystem::path& path, bool comma) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));

    RawTable table;
    table.fingerprint = hex;
    std::istringstream lines(content);
    std::string line;
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto tokens = tokenize(line, comma);
        std::vector<double> values;
        values.reserve(tokens.size());
        for (std::size_t col = 0; col < tokens.size(); ++col)
            values.push_back(parse_cell(tokens[col], row, col));
        table.rows.push_back(std::move(values));
        ++row;
    }
    if (table.rows.empty()) throw DataError("dataset file is empty: " + path.string());
    return table;
}

void normalize_column_range(Matrix& X) {
    for (std::size_t c = 0; c < X.cols; ++c) {
        double lo = X(0, c), hi = X(0, c);
        for (std::size_t r = 1; r < X.rows; ++r) {
            lo = std::min(lo, X(r, c));
            hi = std::max(hi, X(r, c));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < X.rows; ++r)
            X(r, c) = range > 0.0 ? (X(r, c) - lo) / range : 0.0;
    }
}

Dataset assemble(std::string name, Matrix X, std::vector<int> y, std::string fingerprint) {
    std::size_t pos = 0;
    for (int label : y) pos += static_cast<std::size_t>(label);
    if (pos == 0 || pos == y.size())
        throw DataError("dataset '" + name + "': only one class present");

    Dataset ds;
    ds.name = std::move(name);
    ds.feature_names.reserve(X.cols);
    for (std::size_t c = 0; c < X.cols; ++c) ds.feature_names.push_back("f" + std::to_string(c));
    normalize_column_range(X);
    ds.X = std::move(X);
    ds.y = std::move(y);
    // Rarer class is the minority; ties go to label 1.
    ds.minority_label = (pos * 2 <= ds.y.size()) ? 1 : 0;
    ds.fingerprint = std::move(fingerprint);
    return ds;
}

} // namespace

void normalize_columns(Matrix& X) { normalize_column_range(X); }

Dataset load_dataset(const DatasetDescriptor& descriptor, const std::filesystem::path& path) {
    RawTable table = read_table(path, descriptor.comma_delimited);

    if (table.rows.size() != descriptor.expected_rows)
        throw DataError("dataset '" + descriptor.name + "': expected " +
                        std::to_string(descriptor.expected_rows) + " rows, found " +
                        std::to_string(table.rows.size()));
    const std::size_t expected_cols = descriptor.expected_features + 1;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != expected_cols)
            throw DataError("dataset '" + descriptor.name + "': row " + std::to_string(r + 1) +
                            " has " + std::to_string(table.rows[r].size()) +
                            " columns, expected " + std::to_string(expected_cols));
    }

    const std::size_t label_idx =
        descriptor.label_column == LabelColumn::first ? 0 : descriptor.expected_features;
    Matrix X(table.rows.size(), descriptor.expected_features);
    std::vector<int> y(table.rows.size());
    std::set<double> raw_labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        raw_labels.insert(row[label_idx]);
        y[r] = row[label_idx] == descriptor.positive_raw ? 1 : 0;
        std::size_t out = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == label_idx) continue;
            X(r, out++) = row[c];
        }
    }
    if (raw_labels.size() != 2)
        throw DataError("dataset '" + descriptor.name + "': expected 2 distinct label values, found " +
                        std::to_string(raw_labels.size()));
    if (!raw_labels.count(descriptor.positive_raw))
        throw DataError("dataset '" + descriptor.name + "': positive label value " +
                        std::to_string(descriptor.positive_raw) + " absent from file");

    return assemble(descriptor.name, std::move(X), std::move(y), std::move(table.fingerprint));
}

Dataset load_generic(const std::filesystem::path& path, const std::string& name) {
    std::ifstream probe(path);
    if (!probe) throw DataError("cannot open dataset file: " + path.string());
    std::string first_line;
    std::getline(probe, first_line);
    probe.close();
    const bool comma = first_line.find(',') != std::string::npos;

    RawTable table = read_table(path, comma);
    const std::size_t cols = table.rows.front().size();
    if (cols < 2) throw DataError("dataset '" + name + "': need at least one feature column");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != cols)
            throw DataError("dataset '" + name + "': ragged row " + std::to_string(r + 1));
    }

    std::set<double> raw_labels;
    for (const auto& row : table.rows) raw_labels.insert(row.back());
    if (raw_labels.size() != 2)
        throw DataError("dataset '" + name + "': expected 2 distinct label values in the last "
                        "column, found " + std::to_string(raw_labels.size()));
    const double positive = *raw_labels.rbegin();

    Matrix X(table.rows.size(), cols - 1);
    std::vector<int> y(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        y[r] = table.rows[r].back() == positive ? 1 : 0;
        for (std::size_t c = 0; c + 1 < cols; ++c) X(r, c) = table.rows[r][c];
    }
    return assemble(name, std::move(X), std::move(y), std::move(table.fingerprint));
}

std::pair<Matrix, Matrix> split_by_class(const Dataset& ds) {
    std::vector<std::size_t> minority_rows, majority_rows;
    for (std::size_t i = 0; i < ds.y.size(); ++i) {
        (ds.y[i] == ds.minority_label ? minority_rows : majority_rows).push_back(i);
    }
    return {take_rows(ds.X, minority_rows), take_rows(ds.X, majority_rows)};
}

} // namespace tabaug
