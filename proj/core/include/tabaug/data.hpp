#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tabaug/matrix.hpp"

namespace tabaug {

/// Normalized binary-classification dataset. X entries lie in [0,1]
/// (per-column min-max); y entries are 0/1; minority_label is the rarer class
/// (label 1 on a tie).
struct Dataset {
    std::string name;
    Matrix X;
    std::vector<int> y;
    std::vector<std::string> feature_names;
    int minority_label = 1;
    std::string fingerprint; // content hash of the source file
};

enum class LabelColumn { first, last };

struct DatasetDescriptor {
    std::string name;
    std::string file_name; // canonical UCI file name
    std::size_t expected_rows = 0;
    std::size_t expected_features = 0;
    // Features the source table reports; differs from expected_features when
    // the distributed file uses a different encoding (German credit: 20 raw
    // attributes, 24 numeric-encoded columns).
    std::size_t table_reported_features = 0;
    bool comma_delimited = true; // false: any whitespace
    LabelColumn label_column = LabelColumn::last;
    double positive_raw = 1.0; // raw label value mapped to 1
    std::string notes;

    bool attribute_count_caveat() const { return table_reported_features != expected_features; }
};

/// The four experiment datasets: australian (690x14), german (1000x24 numeric
/// encoding), pima (768x8), spect (267x22, train+test concatenated).
std::vector<DatasetDescriptor> registry();

const DatasetDescriptor& descriptor_by_name(const std::string& name);

/// Parses, maps labels to {0,1}, min-max normalizes each column (constant
/// columns map to 0) and verifies row/feature counts against the descriptor.
Dataset load_dataset(const DatasetDescriptor& descriptor, const std::filesystem::path& path);

/// Loader for arbitrary delimited numeric files: label in the last column,
/// exactly two distinct raw label values, the larger one mapped to 1.
/// Delimiter is sniffed from the first line (comma if present).
Dataset load_generic(const std::filesystem::path& path, const std::string& name);

/// Row-disjoint partition by label: (minority rows, majority rows).
std::pair<Matrix, Matrix> split_by_class(const Dataset& ds);

/// Min-max normalization applied by the loaders, exposed for reuse/tests.
void normalize_columns(Matrix& X);

} // namespace tabaug
