#pragma once

// Metric report rows shared by the train, evaluate, benchmark and sweep
// commands. CSV columns, in order:
//
//   method,acc_plus,acc_minus,balanced_accuracy,auc,threshold,seed,wall_time_seconds
//
// A failed cell keeps its method, threshold and seed and leaves the metric
// fields empty in CSV and null in JSON.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepbalance/metrics.hpp"

namespace deepbalance {

inline constexpr const char* kMetricsHeader =
    "method,acc_plus,acc_minus,balanced_accuracy,auc,threshold,seed,wall_time_seconds";

struct MetricsRow {
  std::string method;
  std::optional<double> acc_plus;
  std::optional<double> acc_minus;
  std::optional<double> balanced_accuracy;
  std::optional<double> auc;
  double threshold = 0.5;
  std::uint64_t seed = 0;
  std::optional<double> wall_time_seconds;
  // Set for failed cells; not part of the CSV/JSON row schema.
  std::optional<std::string> error;

  bool failed() const { return error.has_value(); }
};

// Scores a prediction vector at a threshold. Metrics that are undefined for
// the given labels stay empty.
MetricsRow evaluate_scores(std::string method, std::span<const double> scores,
                           std::span<const int> truth, double threshold, std::uint64_t seed,
                           double wall_time_seconds);

std::string metrics_csv_line(const MetricsRow& row);
nlohmann::json metrics_json(const MetricsRow& row);

void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);
void write_metrics_json(std::span<const MetricsRow> rows, const std::filesystem::path& path);

struct RocSeries {
  std::string method;
  std::uint64_t seed = 0;
  RocCurve curve;
};

// method,seed,threshold,fpr,tpr
void write_roc_csv(std::span<const RocSeries> series, const std::filesystem::path& path);

struct SummaryRow {
  std::string method;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_acc_plus = 0, sd_acc_plus = 0;
  double mean_acc_minus = 0, sd_acc_minus = 0;
  double mean_balanced_accuracy = 0, sd_balanced_accuracy = 0;
  double mean_auc = 0, sd_auc = 0;
};

// Per-method mean and sample standard deviation over successful seeds, in
// first-appearance order of the methods.
std::vector<SummaryRow> summarize(std::span<const MetricsRow> rows);
void write_summary_csv(std::span<const SummaryRow> rows, const std::filesystem::path& path);

double mean(std::span<const double> v);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

}  // namespace deepbalance
