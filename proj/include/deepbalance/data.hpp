#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepbalance/numerics.hpp"

namespace deepbalance {

using Labels = std::vector<int>;

// Feature matrix plus 0/1 labels (1 = minority / positive / fraud).
class Dataset {
 public:
  Dataset() = default;
  // Validates: labels.size() == features.rows(), names.size() == features.cols(),
  // at least one feature, labels in {0, 1}.
  Dataset(Matrix features, Labels labels, std::vector<std::string> feature_names);

  const Matrix& features() const { return features_; }
  const Labels& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return feature_names_.size(); }
  std::size_t count_positive() const;
  std::size_t count_negative() const { return rows() - count_positive(); }

  // Row indices of each class, ascending.
  std::vector<std::size_t> indices_of(int label) const;

  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset select_features(std::span<const std::size_t> cols) const;
  // (minority, majority)
  std::pair<Dataset, Dataset> partition_by_class() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Matrix features_;
  Labels labels_;
  std::vector<std::string> feature_names_;
};

// Row-wise concatenation; feature names must agree.
Dataset concat(const Dataset& a, const Dataset& b);

struct CsvSchema {
  std::string label_column;
  // Cell text (after unquoting and trimming) that marks a positive row.
  std::string positive_label = "1";
  std::vector<std::string> drop_columns;
  // Expanded to one indicator column per level, named "<column>=<level>",
  // levels in lexicographic order.
  std::vector<std::string> categorical_columns;
  // When nonempty, only these columns (in file order) become features.
  std::vector<std::string> feature_columns;
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

// Writes "<names...>,<label_column>" with round-trip float formatting.
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& label_column = "label");

struct SplitResult {
  Dataset train;
  Dataset test;
  // Row indices into the input, ascending.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// Per-class sampling without replacement: floor(fraction * class_count) rows of
// each class go to train, the rest to test. Both splits keep input row order.
SplitResult stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

struct StandardizationParams {
  std::vector<double> mean;
  // Population stddev; a constant feature stores 1.
  std::vector<double> stddev;

  friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

StandardizationParams fit_standardizer(const Matrix& x);
inline StandardizationParams fit_standardizer(const Dataset& ds) {
  return fit_standardizer(ds.features());
}
Matrix apply_standardizer(const Matrix& x, const StandardizationParams& params);
Dataset apply_standardizer(const Dataset& ds, const StandardizationParams& params);
Matrix invert_standardizer(const Matrix& z, const StandardizationParams& params);

// Majority rows ~ N(0, I_d), minority rows ~ N(separation * 1_d, I_d).
// Majority rows come first. Feature names are x1..xd.
Dataset generate_synthetic(std::size_t n_majority, std::size_t n_minority, std::size_t d,
                           double class_separation, std::uint64_t seed);

}  // namespace deepbalance
