#pragma once

// Deep belief network base learner: a stack of binary RBMs pretrained
// greedily with contrastive divergence, topped by a single logistic output
// unit and fine-tuned end to end with mini-batch gradient descent on binary
// cross-entropy.
//
// Inputs are expected in [0, 1]. The ensemble feeds standardized features
// through squash_inputs() before they reach a network.

#include <cstddef>
#include <vector>

#include "deepbalance/data.hpp"
#include "deepbalance/numerics.hpp"

namespace deepbalance {

struct RbmLayer {
  Matrix weights;  // visible x hidden
  std::vector<double> visible_bias;
  std::vector<double> hidden_bias;

  std::size_t visible_size() const { return weights.rows(); }
  std::size_t hidden_size() const { return weights.cols(); }

  friend bool operator==(const RbmLayer&, const RbmLayer&) = default;
};

struct DbnHyperparams {
  std::vector<std::size_t> hidden_sizes{10, 5};
  std::size_t cd_k = 1;
  std::size_t pretrain_epochs = 10;
  double pretrain_lr = 1.0;
  double finetune_lr = 1.0;
  std::size_t batch_size = 16;
  std::size_t max_it = 50;

  // Throws ConfigError. pretrain_epochs may be 0; everything else must be
  // positive.
  void validate() const;

  friend bool operator==(const DbnHyperparams&, const DbnHyperparams&) = default;
};

struct DbnModel {
  std::vector<RbmLayer> layers;
  std::vector<double> output_weights;
  double output_bias = 0.0;

  std::size_t input_size() const;
  // Input width followed by every hidden width.
  std::vector<std::size_t> layer_sizes() const;
  // Throws ContractViolation if adjacent shapes disagree.
  void check_shapes() const;

  friend bool operator==(const DbnModel&, const DbnModel&) = default;
};

// Standardized values -> (0, 1) via the logistic function.
Matrix squash_inputs(const Matrix& standardized);

// Weights ~ N(0, 0.01^2), biases 0.
RbmLayer init_rbm(std::size_t visible, std::size_t hidden, RngStream& rng);

Matrix rbm_hidden_probabilities(const RbmLayer& layer, const Matrix& visible);
Matrix rbm_visible_probabilities(const RbmLayer& layer, const Matrix& hidden);
// Mean squared error of the mean-field reconstruction v -> h -> v'.
double rbm_reconstruction_error(const RbmLayer& layer, const Matrix& visible);

// One CD-k step on a mini-batch. Hidden states are sampled for each Gibbs
// step; visible reconstructions use probabilities. The negative statistics
// use the final hidden probabilities.
RbmLayer rbm_cd_update(const RbmLayer& layer, const Matrix& batch, double lr, std::size_t cd_k,
                       RngStream& rng);

// Greedy layerwise pretraining. Each layer trains on the hidden activation
// probabilities of the layer below. The output unit is initialised small
// random.
DbnModel pretrain(const DbnHyperparams& hyper, const Matrix& x, RngStream& rng);

// Exactly hyper.max_it epochs of shuffled mini-batch gradient descent.
DbnModel finetune(DbnModel model, const Matrix& x, const Labels& y, const DbnHyperparams& hyper,
                  RngStream& rng);

inline DbnModel train_dbn(const DbnHyperparams& hyper, const Matrix& x, const Labels& y,
                          RngStream& rng) {
  return finetune(pretrain(hyper, x, rng), x, y, hyper, rng);
}

// Deterministic forward pass; one probability per row.
std::vector<double> predict_proba(const DbnModel& model, const Matrix& x);

// Mean binary cross-entropy.
double cross_entropy_loss(const DbnModel& model, const Matrix& x, const Labels& y);

// Gradient of cross_entropy_loss with respect to every parameter used by the
// forward pass. Visible biases play no part in it.
struct DbnGradient {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> hidden_bias;
  std::vector<double> output_weights;
  double output_bias = 0.0;
};

DbnGradient loss_gradient(const DbnModel& model, const Matrix& x, const Labels& y);

}  // namespace deepbalance
