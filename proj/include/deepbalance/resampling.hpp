#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "deepbalance/data.hpp"
#include "deepbalance/numerics.hpp"

namespace deepbalance {

struct BalancedBootstrap {
  friend bool operator==(BalancedBootstrap, BalancedBootstrap) = default;
};
struct Undersample {
  friend bool operator==(Undersample, Undersample) = default;
};
struct Oversample {
  std::size_t target_count = 1000;
  friend bool operator==(const Oversample&, const Oversample&) = default;
};
struct Smote {
  std::size_t k_neighbors = 5;
  std::size_t amount_multiplier = 2;
  friend bool operator==(const Smote&, const Smote&) = default;
};
struct NoResampling {
  friend bool operator==(NoResampling, NoResampling) = default;
};

using ResampleMethod = std::variant<BalancedBootstrap, Undersample, Oversample, Smote, NoResampling>;

// "balanced_bootstrap", "undersample", "oversample", "smote", "none".
std::string method_name(const ResampleMethod& method);
// Throws ConfigError on x < 1, k < 1 or multiplier < 1.
void validate(const ResampleMethod& method);

// All minority rows unchanged, followed by |minority| majority rows drawn
// with replacement.
Dataset balanced_bootstrap(const Dataset& minority, const Dataset& majority, RngStream& rng);

// All minority rows followed by |minority| majority rows drawn without
// replacement.
Dataset random_undersample(const Dataset& train, RngStream& rng);

// target_count positives and target_count negatives, each drawn with
// replacement from its class.
Dataset random_oversample(const Dataset& train, std::size_t target_count, RngStream& rng);

// k nearest neighbours of every row among the other rows, by Euclidean
// distance; ties broken by lower row index. k is capped at rows - 1.
std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& points, std::size_t k);

struct SyntheticOrigin {
  std::size_t seed;      // minority row index
  std::size_t neighbor;  // minority row index
  double gap;            // in [0, 1)
};

struct SmoteResult {
  // Minority rows, then synthetic rows, then the majority sample.
  Dataset data;
  std::size_t original_minority = 0;
  std::vector<SyntheticOrigin> origins;
};

// For each minority row, amount_multiplier synthetic rows p + gap * (q - p)
// with q one of p's k nearest minority neighbours (distances on features
// standardized over the whole training set). The majority is then sampled
// without replacement down to the augmented minority count.
SmoteResult smote_detailed(const Dataset& train, std::size_t k, std::size_t amount_multiplier,
                           RngStream& rng);
inline Dataset smote(const Dataset& train, std::size_t k, std::size_t amount_multiplier,
                     RngStream& rng) {
  return smote_detailed(train, k, amount_multiplier, rng).data;
}

// Applies a method to a training set. NoResampling returns the input.
Dataset resample(const Dataset& train, const ResampleMethod& method, RngStream& rng);

}  // namespace deepbalance
