// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sepred/numkernel.hpp"

namespace sepred {

enum class ModelVariant { Dpnn, Conv1d };

std::string to_string(ModelVariant v);
ModelVariant variant_from_string(const std::string& name);

/// Architecture and training hyperparameters. The defaults below are the
/// canonical configuration used for every report: 16-unit layers, a 2-unit
/// softmax output, 20 epochs, and Adam with lr 0.001, beta1 0.9,
/// beta2 0.999, epsilon 1e-7, batch size 32.
struct ModelSpec {
  ModelVariant variant = ModelVariant::Dpnn;
  std::size_t hidden_units = 16;
  std::size_t hidden_layers = 1;
  static constexpr std::size_t output_units = 2;  // two-class softmax, always
  std::size_t conv_filters = 16;
  std::size_t conv_kernel_width = 3;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-7;
  std::uint64_t seed = 42;

  /// Throws ConfigError on any non-positive count or out-of-range constant.
  void validate() const;
};

/// Ordered parameter blocks for one built network. Block layout:
///   Dpnn:   [w_hidden_0, b_hidden_0, ..., w_out, b_out]
///   Conv1d: [kernels, conv_bias, w_out, b_out]
/// Shapes are a pure function of (spec, input_width).
class TrainedModel {
public:
  TrainedModel(ModelSpec spec, std::size_t input_width, std::vector<Tensor> params);

  const ModelSpec& spec() const { return spec_; }
  std::size_t input_width() const { return input_width_; }
  std::vector<Tensor>& params() { return params_; }
  const std::vector<Tensor>& params() const { return params_; }

  /// Versioned JSON dump: spec, input_width, flat parameter arrays per
  /// layer, floats at full round-trip precision.
  void save_json(const std::filesystem::path& path) const;
  std::string to_json() const;
  static TrainedModel load_json(const std::filesystem::path& path);
  static TrainedModel from_json(const std::string& text);

private:
  ModelSpec spec_;
  std::size_t input_width_ = 0;
  std::vector<Tensor> params_;
};

struct TrainHistory {
  std::vector<double> per_epoch_loss;      // length == spec.epochs
  std::vector<double> per_epoch_accuracy;  // length == spec.epochs
};

/// Expected parameter-block shapes for (spec, input_width).
std::vector<std::vector<std::size_t>> parameter_shapes(const ModelSpec& spec,
                                                       std::size_t input_width);

/// Glorot-uniform weights drawn from rng, zero biases.
/// Conv1d requires input_width >= conv_kernel_width.
TrainedModel build_model(const ModelSpec& spec, std::size_t input_width, SeededRng& rng);

/// Class probabilities, one row per batch row, rows sum to 1 within 1e-12.
Tensor forward(const TrainedModel& model, const Tensor& batch);

/// Mean over the batch of -ln(prob at the true class), probabilities
/// clamped to [1e-12, 1] before the log. onehot rows must be exactly
/// one-hot; the batch must be nonempty.
double cross_entropy(const Tensor& probs, const Tensor& onehot);

/// Exact gradients of cross_entropy(forward(batch)) with respect to every
/// parameter block, softmax and loss fused as (probs - target)/B at the
/// output. target may be soft; gradients vanish when probs == target.
std::vector<Tensor> backward(const TrainedModel& model, const Tensor& batch,
                             const Tensor& target);

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

AdamState make_adam_state(const std::vector<Tensor>& params);

/// One bias-corrected Adam update; step counts from 1.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state, std::size_t step, const ModelSpec& spec);

struct TrainResult {
  TrainedModel model;
  TrainHistory history;
};

/// Runs exactly spec.epochs epochs. Each epoch shuffles sample order with
/// rng, partitions into batches of batch_size (last batch may be smaller),
/// and applies one adam_step per batch. History records end-of-epoch mean
/// loss and training accuracy over the full training set.
TrainResult train(const ModelSpec& spec, const Tensor& x, const std::vector<int>& y,
                  SeededRng& rng);

/// NxC one-hot rows from labels in {0,1}.
Tensor onehot_labels(const std::vector<int>& y);

/// Compares backward against central finite differences over every
/// parameter and returns the max relative error, normalized by
/// max(1, |analytic|, |numeric|) so near-zero gradients are measured
/// absolutely. corruption, when nonzero, is added to one analytic gradient
/// entry (failure-path testing).
double grad_check(const ModelSpec& spec, const Tensor& x, const std::vector<int>& y,
                  double epsilon, double corruption = 0.0);

}  // namespace sepred
