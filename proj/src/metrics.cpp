#include "deepbalance/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "deepbalance/errors.hpp"

namespace deepbalance {

namespace {

void check_labels(std::span<const int> labels, const char* who) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw ContractViolation(std::string(who) + ": labels must be 0 or 1");
  }
}

struct Prepared {
  std::vector<std::size_t> order;  // by score, descending
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

Prepared prepare(std::span<const double> scores, std::span<const int> truth, const char* who) {
  if (scores.size() != truth.size()) {
    throw ContractViolation(std::string(who) + ": scores and labels differ in length");
  }
  check_labels(truth, who);
  Prepared p;
  p.positives = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
  p.negatives = truth.size() - p.positives;
  if (p.positives == 0 || p.negatives == 0) {
    throw UndefinedMetricError(std::string(who) + ": both classes must be present");
  }
  p.order.resize(scores.size());
  std::iota(p.order.begin(), p.order.end(), std::size_t{0});
  std::stable_sort(p.order.begin(), p.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return p;
}

}  // namespace

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw ContractViolation("confusion: label vectors differ in length");
  }
  check_labels(truth, "confusion");
  check_labels(predicted, "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      (predicted[i] == 1 ? c.tp : c.fn) += 1;
    } else {
      (predicted[i] == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double error_rate(const ConfusionCounts& c) {
  if (c.total() == 0) throw UndefinedMetricError("error_rate: no observations");
  return static_cast<double>(c.fp + c.fn) / static_cast<double>(c.total());
}

double acc_plus(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) throw UndefinedMetricError("acc_plus: no positive cases");
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double acc_minus(const ConfusionCounts& c) {
  if (c.tn + c.fp == 0) throw UndefinedMetricError("acc_minus: no negative cases");
  return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

double weighted_accuracy(double plus, double minus, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ContractViolation("weighted_accuracy: beta outside [0, 1]");
  return beta * minus + (1.0 - beta) * plus;
}

double weighted_accuracy(const ConfusionCounts& c, double beta) {
  return weighted_accuracy(acc_plus(c), acc_minus(c), beta);
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> truth) {
  const Prepared p = prepare(scores, truth, "roc_curve");
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < p.order.size();) {
    const double s = scores[p.order[i]];
    for (; i < p.order.size() && scores[p.order[i]] == s; ++i) {
      (truth[p.order[i]] == 1 ? tp : fp) += 1;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(p.negatives),
                            static_cast<double>(tp) / static_cast<double>(p.positives)});
    curve.thresholds.push_back(s);
  }
  return curve;
}

double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

double auc(std::span<const double> scores, std::span<const int> truth) {
  const Prepared p = prepare(scores, truth, "auc");
  // Walk groups of equal score from the top; count, for every positive, the
  // negatives strictly below it (2 credits) and tied with it (1 credit).
  std::uint64_t negatives_above = 0;
  std::uint64_t twice_wins = 0;
  for (std::size_t i = 0; i < p.order.size();) {
    const double s = scores[p.order[i]];
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    for (; i < p.order.size() && scores[p.order[i]] == s; ++i) {
      (truth[p.order[i]] == 1 ? pos : neg) += 1;
    }
    const std::uint64_t negatives_below = p.negatives - negatives_above - neg;
    twice_wins += 2 * pos * negatives_below + pos * neg;
    negatives_above += neg;
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(p.positives) * static_cast<double>(p.negatives));
}

}  // namespace deepbalance
