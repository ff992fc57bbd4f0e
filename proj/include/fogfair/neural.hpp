#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fogfair/core.hpp"

namespace fogfair {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    values.assign(n, 0.0);
  }
  std::size_t size() const { return values.size(); }
};

enum class LayerKind { Conv1D, ReLU, GlobalMeanPool, Dense };

/// One layer of the sequential network. Conv1D weights are [out][in][k],
/// Dense weights [out][in]; ReLU and the pool carry no parameters.
struct Layer {
  LayerKind kind = LayerKind::ReLU;
  std::size_t kernel_size = 0;
  std::size_t in_dim = 0;   // conv: in channels; dense: in features
  std::size_t out_dim = 0;  // conv: out channels; dense: out features
  Tensor weights;
  Tensor bias;
  bool frozen = false;

  bool has_params() const { return kind == LayerKind::Conv1D || kind == LayerKind::Dense; }
};

struct NeuralModel {
  std::vector<Layer> layers;
  std::size_t input_channels = 0;
  std::size_t min_input_len = 0;  // shortest window the conv stack accepts
  std::uint64_t init_seed = 0;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::array<double, 2> class_weights{1.0, 1.0};
  std::uint64_t rng_seed = 0;
};

/// Per-layer parameter gradients, aligned with NeuralModel::layers.
struct GradientSet {
  std::vector<Tensor> weights;
  std::vector<Tensor> bias;

  static GradientSet zeros_like(const NeuralModel& model);
  void scale(double s);
};

struct ForwardCache {
  // acts[i] = input of layer i; acts[n_layers] = logits. Pool output and
  // later activations are stored as 1-row matrices.
  std::vector<Matrix> acts;
};

/// Builds the fixed detector architecture:
/// Conv1D(9,16) > ReLU > Conv1D(9,16) > ReLU > Conv1D(9,32) > ReLU >
/// Conv1D(9,32) > ReLU > GlobalMeanPool > Dense(64) > ReLU > Dense(2).
/// Weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
NeuralModel make_neural_model(std::size_t input_channels, std::uint64_t init_seed);

/// Forward pass over one [T x C] window; returns the two logits.
/// T must be >= model.min_input_len.
std::array<double, 2> forward(const NeuralModel& model, const Matrix& input,
                              ForwardCache* cache = nullptr);

/// Index into ForwardCache::acts of the penultimate representation (the
/// final Dense layer's input) plus its dimensionality.
std::size_t representation_layer(const NeuralModel& model);
std::size_t representation_dim(const NeuralModel& model);

/// Backpropagates from a gradient at the output of layer `from_layer`
/// (pass layers.size() to start at the logits). Adds parameter gradients
/// scaled by `scale` into grads (frozen layers stay zero) and returns the
/// gradient at the model input of the injection path.
Matrix backward(const NeuralModel& model, const ForwardCache& cache, const Matrix& grad_out,
                std::size_t from_layer, double scale, GradientSet& grads);

/// Class-weighted cross-entropy over a batch: sum(w_i * ce_i) / sum(w_i).
/// Gradients are exact analytic derivatives; frozen layers receive zero.
double forward_backward(const NeuralModel& model, const std::vector<const Matrix*>& batch,
                        const std::vector<std::uint8_t>& labels,
                        const std::array<double, 2>& class_weights, GradientSet& grads);

/// w -= lr * g on unfrozen layers.
void sgd_step(NeuralModel& model, const GradientSet& grads, double learning_rate);

/// Softmax probability of the FOG class per input.
std::vector<double> predict_scores(const NeuralModel& model, const std::vector<Matrix>& inputs);

/// Epoch/minibatch driver shared by plain and debiased training so both
/// consume the shuffle stream identically. Indices are reshuffled per epoch
/// from the seed's "shuffle" stream; the trailing partial batch is kept.
void run_epochs(std::size_t n_samples, const TrainConfig& cfg,
                const std::function<void(const std::vector<std::size_t>&)>& on_batch,
                const std::function<void(std::size_t)>& on_epoch_end);

/// Minibatch SGD; deterministic given cfg.rng_seed. With a validation split
/// supplied, returns the epoch checkpoint with the best validation macro F1.
NeuralModel train_neural(const std::vector<Matrix>& inputs,
                         const std::vector<std::uint8_t>& labels, const TrainConfig& cfg,
                         const std::vector<Matrix>* val_inputs = nullptr,
                         const std::vector<std::uint8_t>* val_labels = nullptr);

/// Freezes the first freeze_prefix weight-bearing layers of `pretrained`
/// bitwise and fine-tunes the rest on target data.
NeuralModel transfer_finetune(const NeuralModel& pretrained, const std::vector<Matrix>& inputs,
                              const std::vector<std::uint8_t>& labels, std::size_t freeze_prefix,
                              const TrainConfig& cfg);

/// Inverse-class-frequency weights for the training split.
std::array<double, 2> inverse_frequency_weights(const std::vector<std::uint8_t>& labels);

}  // namespace fogfair
