#include "deepbalance/resampling.hpp"

#include <algorithm>
#include <numeric>

#include "deepbalance/errors.hpp"
#include "deepbalance/kernels.hpp"

namespace deepbalance {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_both_classes(const Dataset& train, const char* who) {
  if (train.count_positive() == 0 || train.count_negative() == 0) {
    throw ResampleError(std::string(who) + ": both classes must be present");
  }
}

// First `count` entries of a random permutation of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    RngStream& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  }
  idx.resize(count);
  return idx;
}

std::vector<std::size_t> sample_with_replacement(std::size_t n, std::size_t count,
                                                 RngStream& rng) {
  std::vector<std::size_t> idx(count);
  for (auto& i : idx) i = rng.uniform_index(n);
  return idx;
}

}  // namespace

std::string method_name(const ResampleMethod& method) {
  return std::visit(Overloaded{
                        [](const BalancedBootstrap&) { return std::string("balanced_bootstrap"); },
                        [](const Undersample&) { return std::string("undersample"); },
                        [](const Oversample&) { return std::string("oversample"); },
                        [](const Smote&) { return std::string("smote"); },
                        [](const NoResampling&) { return std::string("none"); },
                    },
                    method);
}

void validate(const ResampleMethod& method) {
  if (const auto* o = std::get_if<Oversample>(&method); o && o->target_count < 1) {
    throw ConfigError("oversample: target count must be at least 1");
  }
  if (const auto* s = std::get_if<Smote>(&method)) {
    if (s->k_neighbors < 1) throw ConfigError("smote: k must be at least 1");
    if (s->amount_multiplier < 1) throw ConfigError("smote: amount multiplier must be at least 1");
  }
}

Dataset balanced_bootstrap(const Dataset& minority, const Dataset& majority, RngStream& rng) {
  if (minority.rows() == 0 || majority.rows() == 0) {
    throw ResampleError("balanced_bootstrap: minority and majority sets must be nonempty");
  }
  const auto picks = sample_with_replacement(majority.rows(), minority.rows(), rng);
  return concat(minority, majority.subset(picks));
}

Dataset random_undersample(const Dataset& train, RngStream& rng) {
  require_both_classes(train, "random_undersample");
  const auto [minority, majority] = train.partition_by_class();
  if (majority.rows() < minority.rows()) {
    throw ResampleError("random_undersample: fewer majority rows than minority rows");
  }
  const auto picks = sample_without_replacement(majority.rows(), minority.rows(), rng);
  return concat(minority, majority.subset(picks));
}

Dataset random_oversample(const Dataset& train, std::size_t target_count, RngStream& rng) {
  if (target_count < 1) throw ResampleError("random_oversample: x must be at least 1");
  require_both_classes(train, "random_oversample");
  const auto [minority, majority] = train.partition_by_class();
  const auto pos = sample_with_replacement(minority.rows(), target_count, rng);
  const auto neg = sample_with_replacement(majority.rows(), target_count, rng);
  return concat(minority.subset(pos), majority.subset(neg));
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& points, std::size_t k) {
  const std::size_t n = points.rows();
  const std::size_t k_eff = n == 0 ? 0 : std::min(k, n - 1);
  const auto& kern = kernels::active();
  std::vector<std::vector<std::size_t>> result(n);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back(kern.squared_distance(points.row(i).data(), points.row(j).data(),
                                              points.cols()),
                        j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_eff), dist.end());
    result[i].reserve(k_eff);
    for (std::size_t r = 0; r < k_eff; ++r) result[i].push_back(dist[r].second);
  }
  return result;
}

SmoteResult smote_detailed(const Dataset& train, std::size_t k, std::size_t amount_multiplier,
                           RngStream& rng) {
  if (k < 1) throw ResampleError("smote: k must be at least 1");
  if (amount_multiplier < 1) throw ResampleError("smote: amount multiplier must be at least 1");
  const auto [minority, majority] = train.partition_by_class();
  if (minority.rows() < 2) throw ResampleError("smote: at least two minority rows are required");
  if (majority.rows() == 0) throw ResampleError("smote: majority class is empty");

  const std::size_t m = minority.rows();
  const std::size_t target = m * (1 + amount_multiplier);
  if (majority.rows() < target) {
    throw ResampleError("smote: majority has " + std::to_string(majority.rows()) +
                        " rows, fewer than the augmented minority count " +
                        std::to_string(target));
  }

  const auto scaler = fit_standardizer(train.features());
  const auto neighbors = nearest_neighbors(apply_standardizer(minority.features(), scaler), k);

  const std::size_t d = train.cols();
  const Matrix& px = minority.features();
  Matrix synth(m * amount_multiplier, d);
  SmoteResult result;
  result.original_minority = m;
  result.origins.reserve(synth.rows());
  std::size_t out = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& nn = neighbors[i];
    for (std::size_t r = 0; r < amount_multiplier; ++r, ++out) {
      const std::size_t q = nn[rng.uniform_index(nn.size())];
      const double gap = rng.uniform();
      for (std::size_t j = 0; j < d; ++j) synth(out, j) = px(i, j) + gap * (px(q, j) - px(i, j));
      result.origins.push_back({i, q, gap});
    }
  }

  const Dataset synthetic(std::move(synth), Labels(m * amount_multiplier, 1),
                          train.feature_names());
  const auto picks = sample_without_replacement(majority.rows(), target, rng);
  result.data = concat(concat(minority, synthetic), majority.subset(picks));
  return result;
}

Dataset resample(const Dataset& train, const ResampleMethod& method, RngStream& rng) {
  validate(method);
  return std::visit(
      Overloaded{
          [&](const BalancedBootstrap&) {
            require_both_classes(train, "balanced_bootstrap");
            const auto [minority, majority] = train.partition_by_class();
            return balanced_bootstrap(minority, majority, rng);
          },
          [&](const Undersample&) { return random_undersample(train, rng); },
          [&](const Oversample& o) { return random_oversample(train, o.target_count, rng); },
          [&](const Smote& s) { return smote(train, s.k_neighbors, s.amount_multiplier, rng); },
          [&](const NoResampling&) { return train; },
      },
      method);
}

}  // namespace deepbalance
