#include "deepbalance/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "deepbalance/csv.hpp"
#include "deepbalance/ensemble.hpp"
#include "deepbalance/errors.hpp"

namespace deepbalance {

namespace {

std::string cell(const std::optional<double>& v) { return v ? csv::format_double(*v) : ""; }

nlohmann::json value(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  return out;
}

template <class F>
std::optional<double> try_metric(F&& f) {
  try {
    return f();
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

}  // namespace

MetricsRow evaluate_scores(std::string method, std::span<const double> scores,
                           std::span<const int> truth, double threshold, std::uint64_t seed,
                           double wall_time_seconds) {
  MetricsRow row;
  row.method = std::move(method);
  row.threshold = threshold;
  row.seed = seed;
  row.wall_time_seconds = wall_time_seconds;
  const auto predicted = classify(scores, threshold);
  const auto c = confusion(truth, predicted);
  row.acc_plus = try_metric([&] { return acc_plus(c); });
  row.acc_minus = try_metric([&] { return acc_minus(c); });
  row.balanced_accuracy = try_metric([&] { return balanced_accuracy(c); });
  row.auc = try_metric([&] { return auc(scores, truth); });
  return row;
}

std::string metrics_csv_line(const MetricsRow& row) {
  std::ostringstream os;
  os << row.method << ',' << cell(row.acc_plus) << ',' << cell(row.acc_minus) << ','
     << cell(row.balanced_accuracy) << ',' << cell(row.auc) << ','
     << csv::format_double(row.threshold) << ',' << row.seed << ','
     << cell(row.wall_time_seconds);
  return os.str();
}

nlohmann::json metrics_json(const MetricsRow& row) {
  return {
      {"method", row.method},
      {"acc_plus", value(row.acc_plus)},
      {"acc_minus", value(row.acc_minus)},
      {"balanced_accuracy", value(row.balanced_accuracy)},
      {"auc", value(row.auc)},
      {"threshold", row.threshold},
      {"seed", row.seed},
      {"wall_time_seconds", value(row.wall_time_seconds)},
  };
}

void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) out << metrics_csv_line(r) << '\n';
}

void write_metrics_json(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) arr.push_back(metrics_json(r));
  auto out = open_for_write(path);
  out << arr.dump(2) << '\n';
}

void write_roc_csv(std::span<const RocSeries> series, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "method,seed,threshold,fpr,tpr\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.curve.points.size(); ++i) {
      out << s.method << ',' << s.seed << ',' << csv::format_double(s.curve.thresholds[i]) << ','
          << csv::format_double(s.curve.points[i].fpr) << ','
          << csv::format_double(s.curve.points[i].tpr) << '\n';
    }
  }
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<SummaryRow> summarize(std::span<const MetricsRow> rows) {
  std::vector<SummaryRow> out;
  for (const auto& r : rows) {
    bool seen = false;
    for (const auto& s : out) seen = seen || s.method == r.method;
    if (seen) continue;

    SummaryRow s;
    s.method = r.method;
    std::vector<double> ap, am, ba, au;
    for (const auto& q : rows) {
      if (q.method != r.method) continue;
      ++s.runs;
      if (q.failed()) {
        ++s.failures;
        continue;
      }
      if (q.acc_plus) ap.push_back(*q.acc_plus);
      if (q.acc_minus) am.push_back(*q.acc_minus);
      if (q.balanced_accuracy) ba.push_back(*q.balanced_accuracy);
      if (q.auc) au.push_back(*q.auc);
    }
    s.mean_acc_plus = mean(ap), s.sd_acc_plus = sample_sd(ap);
    s.mean_acc_minus = mean(am), s.sd_acc_minus = sample_sd(am);
    s.mean_balanced_accuracy = mean(ba), s.sd_balanced_accuracy = sample_sd(ba);
    s.mean_auc = mean(au), s.sd_auc = sample_sd(au);
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(std::span<const SummaryRow> rows, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "method,runs,failures,mean_acc_plus,sd_acc_plus,mean_acc_minus,sd_acc_minus,"
         "mean_balanced_accuracy,sd_balanced_accuracy,mean_auc,sd_auc\n";
  const auto f = [](double v) { return csv::format_double(v); };
  for (const auto& s : rows) {
    out << s.method << ',' << s.runs << ',' << s.failures << ',' << f(s.mean_acc_plus) << ','
        << f(s.sd_acc_plus) << ',' << f(s.mean_acc_minus) << ',' << f(s.sd_acc_minus) << ','
        << f(s.mean_balanced_accuracy) << ',' << f(s.sd_balanced_accuracy) << ','
        << f(s.mean_auc) << ',' << f(s.sd_auc) << '\n';
  }
}

}  // namespace deepbalance
