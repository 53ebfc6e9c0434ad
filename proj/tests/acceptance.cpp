// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero iff some criterion failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dbn_oracle.hpp"
#include "deepbalance/errors.hpp"
#include "deepbalance/experiment.hpp"
#include "deepbalance/kernels.hpp"
#include "deepbalance/metrics.hpp"
#include "deepbalance/resampling.hpp"
#include "deepbalance/serialize.hpp"
#include "resampling_oracle.hpp"

using namespace deepbalance;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
  Outcome outcome = Outcome::Pass;
  std::string detail;
};

Verdict verdict(bool ok, std::string detail) {
  return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)};
}

int failures = 0;

void criterion(int id, const char* title, double limit_seconds,
               const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {Outcome::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (v.outcome != Outcome::Skip && secs > limit_seconds) {
    v.outcome = Outcome::Fail;
    v.detail += "; over the time limit";
  }
  const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
  if (v.outcome == Outcome::Fail) ++failures;
  std::printf("%s [%d] %s: %s (%.2fs, limit %.0fs)\n", tag, id, title, v.detail.c_str(), secs,
              limit_seconds);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = 0.5 * (i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(ranks(a), ranks(b));
}

template <class F>
bool throws_undefined(F f) {
  try {
    f();
  } catch (const UndefinedMetricError&) {
    return true;
  }
  return false;
}

Dataset standard_synthetic() { return generate_synthetic(20000, 200, 10, 3.0, 7); }

Verdict metric_oracles() {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  std::uniform_int_distribution<int> level(0, 9);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(gen);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(i == 0 || (i > 1 && gen() % 4 == 0));
      s[i] = trial % 2 ? level(gen) / 10.0 : std::generate_canonical<double, 53>(gen);
    }
    std::shuffle(y.begin(), y.end(), gen);
    const double oracle = pairwise_auc(s, y);
    worst = std::max({worst, std::abs(trapezoid_area(roc_curve(s, y)) - oracle),
                      std::abs(auc(s, y) - oracle)});
  }
  const ConfusionCounts c{2, 3, 97, 2};
  const bool arithmetic =
      acc_plus(c) == 0.5 && std::abs(acc_minus(c) - 0.97) < 1e-15 &&
      std::abs(weighted_accuracy(0.8176, 0.9946, 0.5) - 0.9061) < 1e-12 &&
      std::abs(weighted_accuracy(0.7618, 0.9402, 0.5) - 0.8510) < 1e-12 &&
      weighted_accuracy(c, 1.0) == acc_minus(c) &&
      std::abs(error_rate(ConfusionCounts{2, 5, 10, 0}) - 5.0 / 17.0) < 1e-15;
  return verdict(worst <= 1e-12 && arithmetic,
                 "max |AUC - oracle| = " + fmt(worst) + " over 200 instances, hand arithmetic " +
                     (arithmetic ? "ok" : "MISMATCH"));
}

Verdict gradient_check() {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<std::size_t> dim(1, 5), h1(1, 4), h2(1, 3), rows(2, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    auto rng = derive_stream(300, trial);
    std::vector<std::size_t> hidden{h1(gen)};
    if (trial % 2 == 0) hidden.push_back(h2(gen));
    const std::size_t d = dim(gen);
    const DbnModel m = testing::random_dbn(d, hidden, rng);
    Matrix x(rows(gen), d);
    for (double& v : x.values()) v = u(gen);
    Labels y(x.rows());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(gen() % 2);
    worst = std::max(worst, testing::check_gradient(m, x, y).max_relative_error);
  }
  return verdict(worst < 1e-5, "max relative error " + fmt(worst) + " over 20 models");
}

Verdict resampler_invariants() {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> npos(6, 25), extra(0, 200), dim(1, 5);
  std::normal_distribution<double> normal;
  int bad_bootstrap = 0, bad_under = 0, bad_smote = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const std::size_t p = npos(gen);
    const std::size_t n = 3 * p + extra(gen);
    const std::size_t d = dim(gen);
    Matrix x(p + n, d);
    Labels y(p + n);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      y[i] = i < p;
      for (std::size_t j = 0; j < d; ++j) x(i, j) = normal(gen) + (y[i] ? 1.0 : 0.0);
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
    const Dataset train(std::move(x), std::move(y), std::move(names));
    auto rng = derive_stream(trial, 0);

    const auto [minority, majority] = train.partition_by_class();
    const Dataset boot = balanced_bootstrap(minority, majority, rng);
    if (boot.rows() != 2 * p || boot.count_positive() != p) ++bad_bootstrap;

    const Dataset under = random_undersample(train, rng);
    std::set<std::vector<double>> seen;
    for (std::size_t i = 0; i < under.rows(); ++i) {
      if (under.labels()[i] != 0) continue;
      const auto row = under.features().row(i);
      if (!seen.emplace(row.begin(), row.end()).second) ++bad_under;
    }
    if (seen.size() != p) ++bad_under;

    const std::size_t k = 1 + trial % 5;
    const Dataset sm = smote(train, k, 2, rng);
    if (!testing::smote_synthetics_valid(train, sm, k, 2)) ++bad_smote;
  }
  return verdict(bad_bootstrap + bad_under + bad_smote == 0,
                 "violations over 50 instances: bootstrap " + std::to_string(bad_bootstrap) +
                     ", undersample " + std::to_string(bad_under) + ", smote " +
                     std::to_string(bad_smote));
}

Verdict determinism() {
  const SplitResult split = stratified_split(standard_synthetic(), 0.7, 42);
  TrainConfig config;
  config.seed = 42;
  const std::string one = serialize_ensemble(train_deepbalance(split.train, config, 1));
  const bool two = serialize_ensemble(train_deepbalance(split.train, config, 2)) == one;
  const bool four = serialize_ensemble(train_deepbalance(split.train, config, 4)) == one;
  return verdict(two && four, std::string("2 workers ") + (two ? "identical" : "DIFFER") +
                                  ", 4 workers " + (four ? "identical" : "DIFFER") + " (" +
                                  std::to_string(one.size()) + " bytes)");
}

Verdict directional_benchmark() {
  ExperimentSpec spec;
  const Dataset data = standard_synthetic();
  const auto deep = parse_method("deepbalance", spec);
  const auto none = parse_method("none", spec);
  const auto under = parse_method("undersample", spec);
  double deep_auc = 0, none_auc = 0, deep_ba = 0, under_ba = 0;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  for (std::uint64_t seed : seeds) {
    const SplitResult split = stratified_split(data, spec.split, seed);
    const auto d = run_cell(spec, deep, split, seed, false);
    const auto n = run_cell(spec, none, split, seed, false);
    const auto u = run_cell(spec, under, split, seed, false);
    for (const auto* cell : {&d, &n, &u}) {
      if (cell->metrics.failed()) throw std::runtime_error(*cell->metrics.error);
    }
    deep_auc += *d.metrics.auc / seeds.size();
    none_auc += *n.metrics.auc / seeds.size();
    deep_ba += *d.metrics.balanced_accuracy / seeds.size();
    under_ba += *u.metrics.balanced_accuracy / seeds.size();
  }
  return verdict(deep_auc >= 0.90 && deep_auc >= none_auc && deep_ba >= under_ba,
                 "AUC deepbalance " + fmt(deep_auc) + " vs none " + fmt(none_auc) +
                     "; balanced accuracy deepbalance " + fmt(deep_ba) + " vs undersample " +
                     fmt(under_ba));
}

Verdict sweep_trends() {
  // A harder variant of the synthetic set so AUC is not saturated. Times are
  // medians over seeds.
  ExperimentSpec spec;
  spec.data.separation = 0.35;
  spec.data.n_minority = 1000;
  spec.seeds = {1, 2, 3, 4, 5};
  spec.workers = 1;
  spec.deepbalance.max_it = 50;

  spec.sweep_parameter = "total_nets";
  spec.sweep_values = parse_count_list("1..10");
  const auto nets = run_sweep(spec);
  std::vector<double> x, auc_v, time_v;
  for (const auto& r : nets) {
    x.push_back(static_cast<double>(r.value));
    auc_v.push_back(r.mean_auc);
    time_v.push_back(r.median_train_seconds);
  }
  const double rho_auc = spearman(auc_v, x);
  const double rho_time = spearman(time_v, x);

  spec.sweep_parameter = "max_it";
  spec.sweep_values = parse_count_list("20..100:20");
  const auto its = run_sweep(spec);
  std::vector<double> xi, ti;
  for (const auto& r : its) {
    xi.push_back(static_cast<double>(r.value));
    ti.push_back(r.median_train_seconds);
  }
  const double r = pearson(xi, ti);
  const double r2 = r * r;
  std::size_t failed = 0;
  for (const auto& row : nets) failed += row.failures;
  for (const auto& row : its) failed += row.failures;
  return verdict(failed == 0 && rho_auc > 0.0 && rho_time > 0.9 && r2 > 0.9,
                 "spearman(AUC, total_nets) " + fmt(rho_auc) + " (AUC " + fmt(auc_v.front()) +
                     " -> " + fmt(auc_v.back()) + "), spearman(time, total_nets) " +
                     fmt(rho_time) + ", R^2(time ~ max_it) " + fmt(r2));
}

Verdict credit_card() {
  std::filesystem::path path = "data/creditcard.csv";
  if (const char* env = std::getenv("DEEPBALANCE_CREDITCARD_CSV")) path = env;
  if (!std::filesystem::exists(path)) {
    return {Outcome::Skip, "credit-card CSV not found (set DEEPBALANCE_CREDITCARD_CSV)"};
  }
  ExperimentSpec spec;
  spec.data.path = path;
  apply_preset(spec.data, "creditcard");
  const Dataset data = load_dataset(spec.data);
  const SplitResult split = stratified_split(data, 0.7, 42);
  const auto cell = run_cell(spec, parse_method("deepbalance", spec), split, 42, false);
  if (cell.metrics.failed()) throw std::runtime_error(*cell.metrics.error);
  const double a = *cell.metrics.auc, ba = *cell.metrics.balanced_accuracy;
  return verdict(a >= 0.93 && ba >= 0.85,
                 "AUC " + fmt(a) + " (>= 0.93), balanced accuracy " + fmt(ba) + " (>= 0.85)");
}

Verdict degenerate_inputs() {
  const std::vector<double> s{0.1, 0.7, 0.3};
  const std::vector<int> ones{1, 1, 1}, zeros{0, 0, 0};
  bool undefined = throws_undefined([&] { auc(s, ones); }) &&
                   throws_undefined([&] { roc_curve(s, zeros); }) &&
                   throws_undefined([&] { acc_plus(confusion(zeros, zeros)); }) &&
                   throws_undefined([&] { acc_minus(confusion(ones, ones)); });

  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool monotone = true, half = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(1 + trial % 40);
    for (double& v : scores) v = u(gen);
    std::vector<double> ts(20);
    for (double& t : ts) t = u(gen);
    std::sort(ts.begin(), ts.end());
    Labels prev = classify(scores, 0.0);
    for (double t : ts) {
      const Labels next = classify(scores, t);
      for (std::size_t i = 0; i < scores.size(); ++i) monotone = monotone && next[i] <= prev[i];
      prev = next;
    }
    std::vector<int> truth(scores.size() + 2);
    truth[0] = 1;
    for (std::size_t i = 2; i < truth.size(); ++i) truth[i] = u(gen) < 0.3;
    half = half && balanced_accuracy(confusion(truth, std::vector<int>(truth.size(), 0))) == 0.5;
  }
  return verdict(undefined && monotone && half,
                 std::string("undefined-metric errors ") + (undefined ? "raised" : "MISSING") +
                     ", classify monotone " + (monotone ? "yes" : "NO") +
                     ", all-majority balanced accuracy 0.5 " + (half ? "yes" : "NO"));
}

}  // namespace

int main() {
  std::printf("kernels: %s\n", kernels::active().name);
  criterion(1, "metric oracle equivalence", 5, metric_oracles);
  criterion(2, "gradient correctness", 30, gradient_check);
  criterion(3, "resampler invariants", 30, resampler_invariants);
  criterion(4, "determinism across worker counts", 120, determinism);
  criterion(5, "directional benchmark", 600, directional_benchmark);
  criterion(6, "sweep trends", 900, sweep_trends);
  criterion(7, "credit-card reference run", 3600, credit_card);
  criterion(8, "degenerate inputs", 60, degenerate_inputs);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
