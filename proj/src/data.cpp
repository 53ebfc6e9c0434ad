#include "deepbalance/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "deepbalance/csv.hpp"
#include "deepbalance/errors.hpp"

namespace deepbalance {

namespace {

// Stream ids reserved for data-level randomness; ensemble members use small
// ids starting at 0.
constexpr std::uint64_t kSplitStream = 0x5350'4C49'5400ULL;
constexpr std::uint64_t kSynthStream = 0x5359'4E54'4800ULL;

bool contains(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(' ');
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(' ');
  return s.substr(first, last - first + 1);
}

}  // namespace

Dataset::Dataset(Matrix features, Labels labels, std::vector<std::string> feature_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
  if (labels_.size() != features_.rows()) {
    throw ContractViolation("Dataset: label count does not match feature rows");
  }
  if (feature_names_.empty()) throw ContractViolation("Dataset: at least one feature required");
  if (feature_names_.size() != features_.cols()) {
    throw ContractViolation("Dataset: feature name count does not match feature columns");
  }
  for (int y : labels_) {
    if (y != 0 && y != 1) throw ContractViolation("Dataset: labels must be 0 or 1");
  }
}

std::size_t Dataset::count_positive() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), 1));
}

std::vector<std::size_t> Dataset::indices_of(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(i);
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Labels labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= labels_.size()) throw ContractViolation("Dataset::subset: row out of range");
    labels.push_back(labels_[r]);
  }
  return Dataset(select_rows(features_, rows), std::move(labels), feature_names_);
}

Dataset Dataset::select_features(std::span<const std::size_t> cols) const {
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (std::size_t c : cols) {
    if (c >= feature_names_.size()) {
      throw ContractViolation("Dataset::select_features: column out of range");
    }
    names.push_back(feature_names_[c]);
  }
  return Dataset(select_columns(features_, cols), labels_, std::move(names));
}

std::pair<Dataset, Dataset> Dataset::partition_by_class() const {
  const auto pos = indices_of(1);
  const auto neg = indices_of(0);
  return {subset(pos), subset(neg)};
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.feature_names() != b.feature_names()) {
    throw ContractViolation("concat: feature names differ");
  }
  std::vector<double> values(a.features().values().begin(), a.features().values().end());
  values.insert(values.end(), b.features().values().begin(), b.features().values().end());
  Labels labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  return Dataset(Matrix(a.rows() + b.rows(), a.cols(), std::move(values)), std::move(labels),
                 a.feature_names());
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  if (!std::filesystem::exists(path)) {
    throw LoadError("CSV file not found: '" + path.string() + "'");
  }
  csv::Table table = csv::read(path);
  for (auto& h : table.header) h = trim(h);

  const auto column_index = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
      throw LoadError(path.string() + ": column '" + name + "' not found in header");
    }
    return static_cast<std::size_t>(it - table.header.begin());
  };

  const std::size_t label_col = column_index(schema.label_column);
  for (const auto& name : schema.drop_columns) column_index(name);
  for (const auto& name : schema.categorical_columns) column_index(name);
  for (const auto& name : schema.feature_columns) column_index(name);

  struct Source {
    std::size_t column;
    bool categorical;
    std::vector<std::string> levels;
  };
  std::vector<Source> sources;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (c == label_col || contains(schema.drop_columns, name)) continue;
    if (!schema.feature_columns.empty() && !contains(schema.feature_columns, name)) continue;
    sources.push_back({c, contains(schema.categorical_columns, name), {}});
  }
  if (sources.empty()) throw LoadError(path.string() + ": no feature columns remain");

  std::vector<std::string> names;
  for (auto& src : sources) {
    if (!src.categorical) {
      names.push_back(table.header[src.column]);
      continue;
    }
    std::set<std::string> levels;
    for (const auto& row : table.rows) levels.insert(trim(row[src.column]));
    src.levels.assign(levels.begin(), levels.end());
    for (const auto& level : src.levels) names.push_back(table.header[src.column] + "=" + level);
  }

  const std::size_t n = table.rows.size();
  const std::size_t d = names.size();
  Matrix x(n, d);
  Labels y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const auto where = [&](std::size_t col) {
      return path.string() + ": data row " + std::to_string(i) + " (line " +
             std::to_string(table.line_numbers[i]) + "), column '" + table.header[col] + "'";
    };
    y[i] = trim(row[label_col]) == schema.positive_label ? 1 : 0;
    std::size_t out = 0;
    for (const auto& src : sources) {
      const std::string cell = trim(row[src.column]);
      if (src.categorical) {
        if (cell.empty()) throw LoadError(where(src.column) + ": missing value");
        for (const auto& level : src.levels) x(i, out++) = level == cell ? 1.0 : 0.0;
        continue;
      }
      const auto value = csv::parse_double(cell);
      if (!value) {
        throw LoadError(where(src.column) + ": cannot parse '" + cell + "' as a number");
      }
      x(i, out++) = *value;
    }
  }
  return Dataset(std::move(x), std::move(y), std::move(names));
}

void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write CSV file '" + path.string() + "'");
  for (const auto& name : ds.feature_names()) out << name << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (double v : ds.features().row(i)) out << csv::format_double(v) << ',';
    out << ds.labels()[i] << '\n';
  }
  if (!out) throw LoadError("error while writing '" + path.string() + "'");
}

SplitResult stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw SplitError("stratified_split: train fraction must lie in (0, 1]");
  }
  auto pos = ds.indices_of(1);
  auto neg = ds.indices_of(0);
  if (train_fraction < 1.0 && (pos.empty() || neg.empty())) {
    throw SplitError("stratified_split: both classes must be present");
  }

  RngStream rng(seed, kSplitStream);
  std::vector<char> in_train(ds.rows(), 0);
  for (auto* group : {&pos, &neg}) {
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
    const auto take = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(group->size()) + 1e-9));
    rng.shuffle(*group);
    for (std::size_t i = 0; i < std::min(take, group->size()); ++i) in_train[(*group)[i]] = 1;
  }

  SplitResult result;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    (in_train[i] ? result.train_rows : result.test_rows).push_back(i);
  }
  result.train = ds.subset(result.train_rows);
  if (!result.test_rows.empty()) {
    result.test = ds.subset(result.test_rows);
  } else {
    result.test = Dataset(Matrix(0, ds.cols()), {}, ds.feature_names());
  }
  return result;
}

StandardizationParams fit_standardizer(const Matrix& x) {
  if (x.rows() == 0) throw ContractViolation("fit_standardizer: no rows");
  const double n = static_cast<double>(x.rows());
  StandardizationParams p;
  p.mean.assign(x.cols(), 0.0);
  p.stddev.assign(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) p.mean[j] += x(i, j);
  }
  for (double& m : p.mean) m /= n;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double diff = x(i, j) - p.mean[j];
      p.stddev[j] += diff * diff;
    }
  }
  for (double& s : p.stddev) {
    s = std::sqrt(s / n);
    if (s == 0.0) s = 1.0;
  }
  return p;
}

Matrix apply_standardizer(const Matrix& x, const StandardizationParams& params) {
  if (params.mean.size() != x.cols() || params.stddev.size() != x.cols()) {
    throw ContractViolation("apply_standardizer: parameter length does not match columns");
  }
  Matrix z(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      z(i, j) = (x(i, j) - params.mean[j]) / params.stddev[j];
    }
  }
  return z;
}

Dataset apply_standardizer(const Dataset& ds, const StandardizationParams& params) {
  return Dataset(apply_standardizer(ds.features(), params), ds.labels(), ds.feature_names());
}

Matrix invert_standardizer(const Matrix& z, const StandardizationParams& params) {
  if (params.mean.size() != z.cols() || params.stddev.size() != z.cols()) {
    throw ContractViolation("invert_standardizer: parameter length does not match columns");
  }
  Matrix x(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) {
      x(i, j) = z(i, j) * params.stddev[j] + params.mean[j];
    }
  }
  return x;
}

Dataset generate_synthetic(std::size_t n_majority, std::size_t n_minority, std::size_t d,
                           double class_separation, std::uint64_t seed) {
  if (n_majority < 1 || n_minority < 1 || d < 1) {
    throw ConfigError("generate_synthetic: counts and dimension must be at least 1");
  }
  RngStream rng(seed, kSynthStream);
  const std::size_t n = n_majority + n_minority;
  Matrix x(n, d);
  Labels y(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool minority = i >= n_majority;
    const double centre = minority ? class_separation : 0.0;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = centre + rng.normal();
    y[i] = minority ? 1 : 0;
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  return Dataset(std::move(x), std::move(y), std::move(names));
}

}  // namespace deepbalance
