#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deepbalance {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Label 1 is the positive (minority) class.
ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);

// Misclassifications / observations.
double error_rate(const ConfusionCounts& c);
// TP / (TP + FN). Throws UndefinedMetricError without positives.
double acc_plus(const ConfusionCounts& c);
// TN / (TN + FP). Throws UndefinedMetricError without negatives.
double acc_minus(const ConfusionCounts& c);
// beta * Acc- + (1 - beta) * Acc+
double weighted_accuracy(const ConfusionCounts& c, double beta);
double weighted_accuracy(double acc_plus, double acc_minus, double beta);
inline double balanced_accuracy(const ConfusionCounts& c) { return weighted_accuracy(c, 0.5); }

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

// Empirical ROC. points[0] is (0, 0) with threshold +inf; points[i] for
// i > 0 is the operating point of "score >= thresholds[i]", one per distinct
// score in descending order, so the last point is (1, 1).
struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<double> thresholds;
};

RocCurve roc_curve(std::span<const double> scores, std::span<const int> truth);
double trapezoid_area(const RocCurve& curve);

// Mann-Whitney: P(score_pos > score_neg) + P(tie) / 2, from exact integer
// counts with a single final division.
double auc(std::span<const double> scores, std::span<const int> truth);

}  // namespace deepbalance
