#include "deepbalance/dbn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepbalance/errors.hpp"
#include "deepbalance/kernels.hpp"

namespace deepbalance {

namespace {

constexpr double kInitStddev = 0.01;

void check_unit_interval(const Matrix& m, const char* who) {
  for (double v : m.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractViolation(std::string(who) + ": inputs must lie in [0, 1]");
    }
  }
}

Matrix sample_bernoulli(const Matrix& probs, RngStream& rng) {
  Matrix s(probs.rows(), probs.cols());
  auto out = s.values();
  const auto in = probs.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = rng.bernoulli(in[i]) ? 1.0 : 0.0;
  return s;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct ForwardPass {
  std::vector<Matrix> activations;  // [0] is the input
  std::vector<double> logits;
};

ForwardPass forward(const DbnModel& model, const Matrix& x) {
  if (x.cols() != model.input_size()) {
    throw ContractViolation("DBN forward: input has " + std::to_string(x.cols()) +
                            " columns, model expects " + std::to_string(model.input_size()));
  }
  ForwardPass pass;
  pass.activations.reserve(model.layers.size() + 1);
  pass.activations.push_back(x);
  for (const auto& layer : model.layers) {
    pass.activations.push_back(rbm_hidden_probabilities(layer, pass.activations.back()));
  }
  const Matrix& top = pass.activations.back();
  const auto& k = kernels::active();
  pass.logits.resize(top.rows());
  for (std::size_t i = 0; i < top.rows(); ++i) {
    pass.logits[i] =
        k.dot(top.row(i).data(), model.output_weights.data(), top.cols()) + model.output_bias;
  }
  return pass;
}

void apply_step(DbnModel& model, const DbnGradient& g, double lr) {
  const auto& k = kernels::active();
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    k.axpy(-lr, g.weights[l].values().data(), layer.weights.values().data(),
           layer.weights.size());
    k.axpy(-lr, g.hidden_bias[l].data(), layer.hidden_bias.data(), layer.hidden_bias.size());
  }
  k.axpy(-lr, g.output_weights.data(), model.output_weights.data(), model.output_weights.size());
  model.output_bias -= lr * g.output_bias;
}

}  // namespace

void DbnHyperparams::validate() const {
  if (hidden_sizes.empty()) throw ConfigError("DBN: at least one hidden layer is required");
  for (std::size_t h : hidden_sizes) {
    if (h == 0) throw ConfigError("DBN: hidden layer sizes must be positive");
  }
  if (cd_k < 1) throw ConfigError("DBN: cd_k must be at least 1");
  if (!(pretrain_lr > 0.0) || !(finetune_lr > 0.0)) {
    throw ConfigError("DBN: learning rates must be positive");
  }
  if (batch_size < 1) throw ConfigError("DBN: batch size must be at least 1");
  if (max_it < 1) throw ConfigError("DBN: max_it must be at least 1");
}

std::size_t DbnModel::input_size() const {
  return layers.empty() ? output_weights.size() : layers.front().visible_size();
}

std::vector<std::size_t> DbnModel::layer_sizes() const {
  std::vector<std::size_t> sizes{input_size()};
  for (const auto& l : layers) sizes.push_back(l.hidden_size());
  return sizes;
}

void DbnModel::check_shapes() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.visible_bias.size() != layer.visible_size() ||
        layer.hidden_bias.size() != layer.hidden_size()) {
      throw ContractViolation("DBN: bias length does not match layer " + std::to_string(l));
    }
    if (l + 1 < layers.size() && layer.hidden_size() != layers[l + 1].visible_size()) {
      throw ContractViolation("DBN: layer " + std::to_string(l) + " hidden size does not match " +
                              "the next layer's visible size");
    }
  }
  const std::size_t top = layers.empty() ? output_weights.size() : layers.back().hidden_size();
  if (output_weights.size() != top) {
    throw ContractViolation("DBN: output weight length does not match the top hidden layer");
  }
}

Matrix squash_inputs(const Matrix& standardized) {
  Matrix out = standardized;
  sigmoid_inplace(out);
  return out;
}

RbmLayer init_rbm(std::size_t visible, std::size_t hidden, RngStream& rng) {
  RbmLayer layer{Matrix(visible, hidden), std::vector<double>(visible, 0.0),
                 std::vector<double>(hidden, 0.0)};
  for (double& w : layer.weights.values()) w = rng.normal(0.0, kInitStddev);
  return layer;
}

Matrix rbm_hidden_probabilities(const RbmLayer& layer, const Matrix& visible) {
  Matrix h = matmul(visible, layer.weights);
  add_row_vector(h, layer.hidden_bias);
  sigmoid_inplace(h);
  return h;
}

Matrix rbm_visible_probabilities(const RbmLayer& layer, const Matrix& hidden) {
  Matrix v = matmul_transpose_b(hidden, layer.weights);
  add_row_vector(v, layer.visible_bias);
  sigmoid_inplace(v);
  return v;
}

double rbm_reconstruction_error(const RbmLayer& layer, const Matrix& visible) {
  if (visible.rows() == 0) return 0.0;
  const Matrix recon = rbm_visible_probabilities(layer, rbm_hidden_probabilities(layer, visible));
  return kernels::active().squared_distance(visible.values().data(), recon.values().data(),
                                            visible.size()) /
         static_cast<double>(visible.size());
}

RbmLayer rbm_cd_update(const RbmLayer& layer, const Matrix& batch, double lr, std::size_t cd_k,
                       RngStream& rng) {
  if (batch.cols() != layer.visible_size()) {
    throw ContractViolation("rbm_cd_update: batch width does not match visible size");
  }
  if (cd_k < 1) throw ContractViolation("rbm_cd_update: cd_k must be at least 1");
  if (batch.rows() == 0) return layer;
  check_unit_interval(batch, "rbm_cd_update");

  const Matrix h0 = rbm_hidden_probabilities(layer, batch);
  Matrix h_sample = sample_bernoulli(h0, rng);
  Matrix vk;
  Matrix hk;
  for (std::size_t step = 1; step <= cd_k; ++step) {
    vk = rbm_visible_probabilities(layer, h_sample);
    hk = rbm_hidden_probabilities(layer, vk);
    if (step < cd_k) h_sample = sample_bernoulli(hk, rng);
  }

  const double scale = lr / static_cast<double>(batch.rows());
  const Matrix positive = matmul_transpose_a(batch, h0);
  const Matrix negative = matmul_transpose_a(vk, hk);
  const auto& k = kernels::active();

  RbmLayer next = layer;
  k.axpy(scale, positive.values().data(), next.weights.values().data(), positive.size());
  k.axpy(-scale, negative.values().data(), next.weights.values().data(), negative.size());

  const auto v_pos = column_sums(batch);
  const auto v_neg = column_sums(vk);
  for (std::size_t i = 0; i < next.visible_bias.size(); ++i) {
    next.visible_bias[i] += scale * (v_pos[i] - v_neg[i]);
  }
  const auto h_pos = column_sums(h0);
  const auto h_neg = column_sums(hk);
  for (std::size_t j = 0; j < next.hidden_bias.size(); ++j) {
    next.hidden_bias[j] += scale * (h_pos[j] - h_neg[j]);
  }
  return next;
}

DbnModel pretrain(const DbnHyperparams& hyper, const Matrix& x, RngStream& rng) {
  hyper.validate();
  DbnModel model;
  Matrix input = x;
  std::size_t visible = x.cols();
  std::vector<std::size_t> order(x.rows());
  for (std::size_t hidden : hyper.hidden_sizes) {
    RbmLayer layer = init_rbm(visible, hidden, rng);
    for (std::size_t epoch = 0; epoch < hyper.pretrain_epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(order);
      for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
        const std::size_t stop = std::min(order.size(), start + hyper.batch_size);
        const Matrix batch =
            select_rows(input, std::span<const std::size_t>(order).subspan(start, stop - start));
        layer = rbm_cd_update(layer, batch, hyper.pretrain_lr, hyper.cd_k, rng);
      }
    }
    input = rbm_hidden_probabilities(layer, input);
    model.layers.push_back(std::move(layer));
    visible = hidden;
  }
  model.output_weights.resize(visible);
  for (double& w : model.output_weights) w = rng.normal(0.0, kInitStddev);
  model.output_bias = 0.0;
  return model;
}

DbnModel finetune(DbnModel model, const Matrix& x, const Labels& y, const DbnHyperparams& hyper,
                  RngStream& rng) {
  hyper.validate();
  model.check_shapes();
  if (x.rows() != y.size()) throw ContractViolation("finetune: row count does not match labels");
  std::vector<std::size_t> order(x.rows());
  Labels batch_y;
  for (std::size_t epoch = 0; epoch < hyper.max_it; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t stop = std::min(order.size(), start + hyper.batch_size);
      const auto rows = std::span<const std::size_t>(order).subspan(start, stop - start);
      batch_y.clear();
      for (std::size_t r : rows) batch_y.push_back(y[r]);
      apply_step(model, loss_gradient(model, select_rows(x, rows), batch_y), hyper.finetune_lr);
    }
  }
  for (const auto& layer : model.layers) {
    if (!layer.weights.all_finite()) throw TrainingError("finetune: weights diverged");
  }
  return model;
}

std::vector<double> predict_proba(const DbnModel& model, const Matrix& x) {
  auto pass = forward(model, x);
  for (double& z : pass.logits) z = sigmoid(z);
  return pass.logits;
}

double cross_entropy_loss(const DbnModel& model, const Matrix& x, const Labels& y) {
  if (x.rows() != y.size()) {
    throw ContractViolation("cross_entropy_loss: row count does not match labels");
  }
  if (y.empty()) return 0.0;
  const auto pass = forward(model, x);
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = pass.logits[i];
    total += softplus(z) - (y[i] == 1 ? z : 0.0);
  }
  return total / static_cast<double>(y.size());
}

DbnGradient loss_gradient(const DbnModel& model, const Matrix& x, const Labels& y) {
  if (x.rows() != y.size()) throw ContractViolation("loss_gradient: row count does not match labels");
  const auto pass = forward(model, x);
  const std::size_t n = y.size();
  const double inv_n = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  const std::size_t L = model.layers.size();

  DbnGradient g;
  g.weights.resize(L);
  g.hidden_bias.resize(L);

  // d loss / d logit, one per row.
  Matrix dz(n, 1);
  for (std::size_t i = 0; i < n; ++i) dz(i, 0) = (sigmoid(pass.logits[i]) - y[i]) * inv_n;

  const Matrix& top = pass.activations.back();
  const Matrix gw = matmul_transpose_a(top, dz);
  g.output_weights.assign(gw.values().begin(), gw.values().end());
  g.output_bias = column_sums(dz)[0];

  // delta = dL/d(pre-activation) of the current layer.
  Matrix delta(n, top.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < top.cols(); ++j) {
      const double a = top(i, j);
      delta(i, j) = dz(i, 0) * model.output_weights[j] * a * (1.0 - a);
    }
  }
  for (std::size_t l = L; l-- > 0;) {
    const Matrix& below = pass.activations[l];
    g.weights[l] = matmul_transpose_a(below, delta);
    g.hidden_bias[l] = column_sums(delta);
    if (l == 0) break;
    Matrix prev = matmul_transpose_b(delta, model.layers[l].weights);
    for (std::size_t i = 0; i < prev.rows(); ++i) {
      for (std::size_t j = 0; j < prev.cols(); ++j) {
        const double a = below(i, j);
        prev(i, j) *= a * (1.0 - a);
      }
    }
    delta = std::move(prev);
  }
  return g;
}

}  // namespace deepbalance
