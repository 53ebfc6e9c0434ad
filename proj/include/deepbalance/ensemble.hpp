#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deepbalance/data.hpp"
#include "deepbalance/dbn.hpp"
#include "deepbalance/resampling.hpp"

namespace deepbalance {

enum class Aggregation {
  Mean,          // arithmetic mean of member probabilities
  MajorityVote,  // fraction of members scoring >= 0.5
};

struct TrainConfig {
  std::size_t mtry = 5;
  std::size_t total_nets = 25;
  // Fine-tuning epochs per member; overrides dbn.max_it.
  std::size_t max_it = 50;
  DbnHyperparams dbn;
  std::uint64_t seed = 42;
  ResampleMethod resample = BalancedBootstrap{};
  bool use_feature_sampling = true;
  Aggregation aggregation = Aggregation::Mean;

  // Throws ConfigError.
  void validate(std::size_t feature_count) const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EnsembleMember {
  DbnModel model;
  std::vector<std::size_t> feature_indices;  // sorted, distinct
  StandardizationParams standardizer;        // over feature_indices only

  friend bool operator==(const EnsembleMember&, const EnsembleMember&) = default;
};

struct EnsembleModel {
  std::vector<EnsembleMember> members;
  std::vector<std::string> feature_names;
  TrainConfig config;

  friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

// mtry draws with replacement from [0, feature_count), deduplicated and sorted.
std::vector<std::size_t> sample_features(std::size_t feature_count, std::size_t mtry,
                                         RngStream& rng);

// Trains member m on RngStream(config.seed, m): resample (balanced bootstrap
// by default), draw the feature subset, fit the standardizer on the resampled
// rows, then pretrain and fine-tune one DBN. Members are spread over `workers`
// threads; the result does not depend on the worker count.
EnsembleModel train_deepbalance(const Dataset& train, const TrainConfig& config,
                                std::size_t workers = 1);

// A single member as trained by train_deepbalance.
EnsembleMember train_member(const Dataset& train, const TrainConfig& config, std::size_t index);

// Same as train_deepbalance with feature sampling switched off: every member
// sees all features.
EnsembleModel train_all_features_ensemble(const Dataset& train, TrainConfig config,
                                          std::size_t workers = 1);

// One DBN on all features after a single resampling pass (or none). dbn.max_it
// sets the epoch count.
EnsembleModel train_baseline(const Dataset& train, const ResampleMethod& method,
                             const DbnHyperparams& dbn, std::uint64_t seed);

// Scores in [0, 1]; each member standardizes its own feature subset.
std::vector<double> predict(const EnsembleModel& ensemble, const Matrix& x);
// Per-member probabilities, members x rows.
Matrix member_probabilities(const EnsembleModel& ensemble, const Matrix& x);

// 1 iff score >= threshold.
Labels classify(std::span<const double> scores, double threshold);

}  // namespace deepbalance
