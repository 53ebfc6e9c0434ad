#pragma once

// Brute-force k-NN for SMOTE checks. Standardizes with its own population
// statistics and ranks every pair by (distance, index).

#include <algorithm>
#include <cmath>
#include <vector>

#include "deepbalance/data.hpp"

namespace deepbalance::testing {

inline std::vector<std::vector<std::size_t>> brute_force_minority_knn(const Dataset& train,
                                                                      std::size_t k) {
  const std::size_t d = train.cols();
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  const double n = static_cast<double>(train.rows());
  for (std::size_t i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += train.features()(i, j) / n;
  }
  for (std::size_t i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = train.features()(i, j) - mean[j];
      sd[j] += diff * diff / n;
    }
  }
  for (double& s : sd) s = s > 0.0 ? std::sqrt(s) : 1.0;

  const auto pos = train.indices_of(1);
  std::vector<std::vector<std::size_t>> knn(pos.size());
  for (std::size_t a = 0; a < pos.size(); ++a) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t b = 0; b < pos.size(); ++b) {
      if (a == b) continue;
      double dist = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = (train.features()(pos[a], j) - train.features()(pos[b], j)) / sd[j];
        dist += diff * diff;
      }
      all.emplace_back(dist, b);
    }
    std::sort(all.begin(), all.end());
    for (std::size_t r = 0; r < std::min(k, all.size()); ++r) knn[a].push_back(all[r].second);
  }
  return knn;
}

// True if s = p + t (q - p) for some t in [0, 1], up to tol per coordinate.
inline bool on_segment(std::span<const double> p, std::span<const double> q,
                       std::span<const double> s, double tol = 1e-9) {
  double t = -1.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double len = q[j] - p[j];
    if (std::abs(len) > 1e-12) {
      t = (s[j] - p[j]) / len;
      break;
    }
  }
  if (t < 0.0) {
    // Degenerate segment: s must equal p.
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (std::abs(s[j] - p[j]) > tol) return false;
    }
    return true;
  }
  if (t < -tol || t > 1.0 + tol) return false;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (std::abs(p[j] + t * (q[j] - p[j]) - s[j]) > tol * (1.0 + std::abs(s[j]))) return false;
  }
  return true;
}

// Every synthetic row (positions [m, m * (1 + multiplier)) of a SMOTE output)
// lies on a segment from some minority row to one of that row's true k
// nearest minority neighbours.
inline bool smote_synthetics_valid(const Dataset& train, const Dataset& out, std::size_t k,
                                   std::size_t multiplier) {
  const auto pos = train.indices_of(1);
  const auto knn = brute_force_minority_knn(train, k);
  const std::size_t m = pos.size();
  for (std::size_t s = m; s < m * (1 + multiplier); ++s) {
    if (out.labels()[s] != 1) return false;
    bool found = false;
    for (std::size_t a = 0; a < m && !found; ++a) {
      for (std::size_t b : knn[a]) {
        if (on_segment(train.features().row(pos[a]), train.features().row(pos[b]),
                       out.features().row(s))) {
          found = true;
          break;
        }
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace deepbalance::testing
