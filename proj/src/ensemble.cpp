#include "deepbalance/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

#include "deepbalance/errors.hpp"

namespace deepbalance {

namespace {

Matrix member_inputs(const EnsembleMember& member, const Matrix& x) {
  return squash_inputs(apply_standardizer(select_columns(x, member.feature_indices),
                                          member.standardizer));
}

std::vector<std::size_t> all_features(std::size_t d) {
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < d; ++i) idx[i] = i;
  return idx;
}

EnsembleMember fit_member(const Dataset& resampled, std::vector<std::size_t> features,
                          const DbnHyperparams& dbn, RngStream& rng) {
  const Dataset view = resampled.select_features(features);
  EnsembleMember member;
  member.standardizer = fit_standardizer(view);
  member.feature_indices = std::move(features);
  const Matrix x = squash_inputs(apply_standardizer(view.features(), member.standardizer));
  member.model = train_dbn(dbn, x, view.labels(), rng);
  return member;
}

}  // namespace

void TrainConfig::validate(std::size_t feature_count) const {
  if (mtry < 1 || mtry > feature_count) {
    throw ConfigError("mtry must lie in [1, " + std::to_string(feature_count) + "], got " +
                      std::to_string(mtry));
  }
  if (total_nets < 1) throw ConfigError("total_nets must be at least 1");
  if (max_it < 1) throw ConfigError("max_it must be at least 1");
  DbnHyperparams effective = dbn;
  effective.max_it = max_it;
  effective.validate();
  deepbalance::validate(resample);
}

std::vector<std::size_t> sample_features(std::size_t feature_count, std::size_t mtry,
                                         RngStream& rng) {
  if (mtry < 1 || mtry > feature_count) {
    throw ConfigError("sample_features: mtry must lie in [1, feature_count]");
  }
  std::vector<std::size_t> picks(mtry);
  for (auto& p : picks) p = rng.uniform_index(feature_count);
  std::sort(picks.begin(), picks.end());
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  return picks;
}

EnsembleMember train_member(const Dataset& train, const TrainConfig& config, std::size_t index) {
  RngStream rng(config.seed, index);
  const Dataset resampled = resample(train, config.resample, rng);
  auto features = config.use_feature_sampling ? sample_features(train.cols(), config.mtry, rng)
                                              : all_features(train.cols());
  DbnHyperparams dbn = config.dbn;
  dbn.max_it = config.max_it;
  return fit_member(resampled, std::move(features), dbn, rng);
}

EnsembleModel train_deepbalance(const Dataset& train, const TrainConfig& config,
                                std::size_t workers) {
  config.validate(train.cols());
  if (train.count_positive() == 0 || train.count_negative() == 0) {
    throw TrainingError("train_deepbalance: training data must contain both classes");
  }

  const std::size_t n = config.total_nets;
  std::vector<std::optional<EnsembleMember>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t m = next.fetch_add(1); m < n; m = next.fetch_add(1)) {
      try {
        slots[m] = train_member(train, config, m);
      } catch (...) {
        errors[m] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(workers, 1, n);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  EnsembleModel model;
  model.feature_names = train.feature_names();
  model.config = config;
  model.members.reserve(n);
  for (auto& s : slots) model.members.push_back(std::move(*s));
  return model;
}

EnsembleModel train_all_features_ensemble(const Dataset& train, TrainConfig config,
                                          std::size_t workers) {
  config.use_feature_sampling = false;
  config.mtry = train.cols();
  return train_deepbalance(train, config, workers);
}

EnsembleModel train_baseline(const Dataset& train, const ResampleMethod& method,
                             const DbnHyperparams& dbn, std::uint64_t seed) {
  TrainConfig config;
  config.mtry = train.cols();
  config.total_nets = 1;
  config.max_it = dbn.max_it;
  config.dbn = dbn;
  config.seed = seed;
  config.resample = method;
  config.use_feature_sampling = false;
  config.validate(train.cols());
  if (train.count_positive() == 0 || train.count_negative() == 0) {
    throw TrainingError("train_baseline: training data must contain both classes");
  }

  EnsembleModel model;
  model.feature_names = train.feature_names();
  model.config = config;
  model.members.push_back(train_member(train, config, 0));
  return model;
}

Matrix member_probabilities(const EnsembleModel& ensemble, const Matrix& x) {
  if (x.cols() != ensemble.feature_names.size()) {
    throw ContractViolation("predict: input has " + std::to_string(x.cols()) +
                            " columns, ensemble expects " +
                            std::to_string(ensemble.feature_names.size()));
  }
  Matrix probs(ensemble.members.size(), x.rows());
  for (std::size_t m = 0; m < ensemble.members.size(); ++m) {
    const auto& member = ensemble.members[m];
    const auto p = predict_proba(member.model, member_inputs(member, x));
    std::copy(p.begin(), p.end(), probs.row(m).begin());
  }
  return probs;
}

std::vector<double> predict(const EnsembleModel& ensemble, const Matrix& x) {
  if (ensemble.members.empty()) throw ContractViolation("predict: ensemble has no members");
  const Matrix probs = member_probabilities(ensemble, x);
  const std::size_t m = probs.rows();
  std::vector<double> scores(x.rows());
  std::vector<double> column(m);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < m; ++k) column[k] = probs(k, i);
    if (ensemble.config.aggregation == Aggregation::MajorityVote) {
      const auto votes = std::count_if(column.begin(), column.end(), [](double p) { return p >= 0.5; });
      scores[i] = static_cast<double>(votes) / static_cast<double>(m);
      continue;
    }
    // Summing in sorted order makes the mean independent of member order.
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double p : column) sum += p;
    scores[i] = std::clamp(sum / static_cast<double>(m), 0.0, 1.0);
  }
  return scores;
}

Labels classify(std::span<const double> scores, double threshold) {
  Labels out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
  return out;
}

}  // namespace deepbalance
