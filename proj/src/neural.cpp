#include "fogfair/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fogfair/evaluation.hpp"

namespace fogfair {

GradientSet GradientSet::zeros_like(const NeuralModel& model) {
  GradientSet g;
  g.weights.reserve(model.layers.size());
  g.bias.reserve(model.layers.size());
  for (const auto& layer : model.layers) {
    g.weights.push_back(layer.has_params() ? Tensor(layer.weights.shape) : Tensor());
    g.bias.push_back(layer.has_params() ? Tensor(layer.bias.shape) : Tensor());
  }
  return g;
}

void GradientSet::scale(double s) {
  for (auto& t : weights)
    for (double& v : t.values) v *= s;
  for (auto& t : bias)
    for (double& v : t.values) v *= s;
}

namespace {

void init_layer(Layer& layer, Rng& rng) {
  double fan_in, fan_out;
  if (layer.kind == LayerKind::Conv1D) {
    fan_in = static_cast<double>(layer.in_dim * layer.kernel_size);
    fan_out = static_cast<double>(layer.out_dim * layer.kernel_size);
  } else {
    fan_in = static_cast<double>(layer.in_dim);
    fan_out = static_cast<double>(layer.out_dim);
  }
  double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& w : layer.weights.values) w = (2.0 * rng.next_double() - 1.0) * limit;
  // biases stay zero
}

Layer conv_layer(std::size_t in_ch, std::size_t out_ch, std::size_t k) {
  Layer l;
  l.kind = LayerKind::Conv1D;
  l.kernel_size = k;
  l.in_dim = in_ch;
  l.out_dim = out_ch;
  l.weights = Tensor({out_ch, in_ch, k});
  l.bias = Tensor({out_ch});
  return l;
}

Layer dense_layer(std::size_t in_dim, std::size_t out_dim) {
  Layer l;
  l.kind = LayerKind::Dense;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  l.weights = Tensor({out_dim, in_dim});
  l.bias = Tensor({out_dim});
  return l;
}

Layer relu_layer() {
  Layer l;
  l.kind = LayerKind::ReLU;
  return l;
}

Layer pool_layer() {
  Layer l;
  l.kind = LayerKind::GlobalMeanPool;
  return l;
}

Matrix layer_forward(const Layer& layer, const Matrix& x) {
  switch (layer.kind) {
    case LayerKind::Conv1D: {
      if (x.cols() != layer.in_dim || x.rows() < layer.kernel_size)
        throw Error(ErrorCode::DimensionMismatch, "conv input shape mismatch");
      const std::size_t t_out = x.rows() - layer.kernel_size + 1;
      Matrix y(t_out, layer.out_dim);
      const double* w = layer.weights.values.data();
      for (std::size_t t = 0; t < t_out; ++t)
        for (std::size_t o = 0; o < layer.out_dim; ++o) {
          double acc = layer.bias.values[o];
          for (std::size_t c = 0; c < layer.in_dim; ++c) {
            const double* wo = w + (o * layer.in_dim + c) * layer.kernel_size;
            for (std::size_t k = 0; k < layer.kernel_size; ++k) acc += wo[k] * x(t + k, c);
          }
          y(t, o) = acc;
        }
      return y;
    }
    case LayerKind::ReLU: {
      Matrix y = x;
      for (double& v : y.storage()) v = v > 0.0 ? v : 0.0;
      return y;
    }
    case LayerKind::GlobalMeanPool: {
      Matrix y(1, x.cols());
      const double inv = 1.0 / static_cast<double>(x.rows());
      for (std::size_t c = 0; c < x.cols(); ++c) {
        double acc = 0.0;
        for (std::size_t t = 0; t < x.rows(); ++t) acc += x(t, c);
        y(0, c) = acc * inv;
      }
      return y;
    }
    case LayerKind::Dense: {
      if (x.rows() != 1 || x.cols() != layer.in_dim)
        throw Error(ErrorCode::DimensionMismatch, "dense input shape mismatch");
      Matrix y(1, layer.out_dim);
      for (std::size_t o = 0; o < layer.out_dim; ++o) {
        double acc = layer.bias.values[o];
        const double* wo = layer.weights.values.data() + o * layer.in_dim;
        for (std::size_t i = 0; i < layer.in_dim; ++i) acc += wo[i] * x(0, i);
        y(0, o) = acc;
      }
      return y;
    }
  }
  throw Error(ErrorCode::DimensionMismatch, "unknown layer kind");
}

// Returns the gradient w.r.t. the layer input; accumulates parameter
// gradients (scaled) unless the layer is frozen.
Matrix layer_backward(const Layer& layer, const Matrix& x, const Matrix& gout, double scale,
                      Tensor* gw, Tensor* gb) {
  switch (layer.kind) {
    case LayerKind::Conv1D: {
      const std::size_t t_out = gout.rows();
      const std::size_t k_sz = layer.kernel_size;
      Matrix gin(x.rows(), x.cols());
      const double* w = layer.weights.values.data();
      if (!layer.frozen) {
        for (std::size_t o = 0; o < layer.out_dim; ++o) {
          double bacc = 0.0;
          for (std::size_t t = 0; t < t_out; ++t) bacc += gout(t, o);
          gb->values[o] += scale * bacc;
          for (std::size_t c = 0; c < layer.in_dim; ++c) {
            double* gwo = gw->values.data() + (o * layer.in_dim + c) * k_sz;
            for (std::size_t k = 0; k < k_sz; ++k) {
              double acc = 0.0;
              for (std::size_t t = 0; t < t_out; ++t) acc += gout(t, o) * x(t + k, c);
              gwo[k] += scale * acc;
            }
          }
        }
      }
      for (std::size_t t = 0; t < t_out; ++t)
        for (std::size_t o = 0; o < layer.out_dim; ++o) {
          const double g = gout(t, o);
          if (g == 0.0) continue;
          for (std::size_t c = 0; c < layer.in_dim; ++c) {
            const double* wo = w + (o * layer.in_dim + c) * k_sz;
            for (std::size_t k = 0; k < k_sz; ++k) gin(t + k, c) += g * wo[k];
          }
        }
      return gin;
    }
    case LayerKind::ReLU: {
      Matrix gin(x.rows(), x.cols());
      for (std::size_t i = 0; i < x.storage().size(); ++i)
        gin.storage()[i] = x.storage()[i] > 0.0 ? gout.storage()[i] : 0.0;
      return gin;
    }
    case LayerKind::GlobalMeanPool: {
      Matrix gin(x.rows(), x.cols());
      const double inv = 1.0 / static_cast<double>(x.rows());
      for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t c = 0; c < x.cols(); ++c) gin(t, c) = gout(0, c) * inv;
      return gin;
    }
    case LayerKind::Dense: {
      Matrix gin(1, layer.in_dim);
      for (std::size_t o = 0; o < layer.out_dim; ++o) {
        const double g = gout(0, o);
        const double* wo = layer.weights.values.data() + o * layer.in_dim;
        if (!layer.frozen) {
          gb->values[o] += scale * g;
          double* gwo = gw->values.data() + o * layer.in_dim;
          for (std::size_t i = 0; i < layer.in_dim; ++i) gwo[i] += scale * g * x(0, i);
        }
        for (std::size_t i = 0; i < layer.in_dim; ++i) gin(0, i) += g * wo[i];
      }
      return gin;
    }
  }
  throw Error(ErrorCode::DimensionMismatch, "unknown layer kind");
}

}  // namespace

NeuralModel make_neural_model(std::size_t input_channels, std::uint64_t init_seed) {
  if (input_channels == 0) throw Error(ErrorCode::ConfigError, "input_channels must be positive");
  NeuralModel model;
  model.input_channels = input_channels;
  model.init_seed = init_seed;

  model.layers.push_back(conv_layer(input_channels, 16, 9));
  model.layers.push_back(relu_layer());
  model.layers.push_back(conv_layer(16, 16, 9));
  model.layers.push_back(relu_layer());
  model.layers.push_back(conv_layer(16, 32, 9));
  model.layers.push_back(relu_layer());
  model.layers.push_back(conv_layer(32, 32, 9));
  model.layers.push_back(relu_layer());
  model.layers.push_back(pool_layer());
  model.layers.push_back(dense_layer(32, 64));
  model.layers.push_back(relu_layer());
  model.layers.push_back(dense_layer(64, 2));

  std::size_t shrink = 0;
  for (const auto& l : model.layers)
    if (l.kind == LayerKind::Conv1D) shrink += l.kernel_size - 1;
  model.min_input_len = shrink + 1;

  Rng rng(init_seed);
  for (auto& layer : model.layers)
    if (layer.has_params()) init_layer(layer, rng);
  return model;
}

std::array<double, 2> forward(const NeuralModel& model, const Matrix& input, ForwardCache* cache) {
  if (input.cols() != model.input_channels || input.rows() < model.min_input_len)
    throw Error(ErrorCode::DimensionMismatch,
                "input must be [T x " + std::to_string(model.input_channels) + "] with T >= " +
                    std::to_string(model.min_input_len));
  Matrix act = input;
  if (cache) {
    cache->acts.clear();
    cache->acts.reserve(model.layers.size() + 1);
  }
  for (const auto& layer : model.layers) {
    if (cache) cache->acts.push_back(act);
    act = layer_forward(layer, act);
  }
  if (cache) cache->acts.push_back(act);
  return {act(0, 0), act(0, 1)};
}

std::size_t representation_layer(const NeuralModel& model) { return model.layers.size() - 1; }

std::size_t representation_dim(const NeuralModel& model) {
  return model.layers.back().in_dim;
}

Matrix backward(const NeuralModel& model, const ForwardCache& cache, const Matrix& grad_out,
                std::size_t from_layer, double scale, GradientSet& grads) {
  Matrix g = grad_out;
  for (std::size_t i = from_layer; i-- > 0;) {
    const Layer& layer = model.layers[i];
    g = layer_backward(layer, cache.acts[i], g, scale,
                       layer.has_params() ? &grads.weights[i] : nullptr,
                       layer.has_params() ? &grads.bias[i] : nullptr);
  }
  return g;
}

double forward_backward(const NeuralModel& model, const std::vector<const Matrix*>& batch,
                        const std::vector<std::uint8_t>& labels,
                        const std::array<double, 2>& class_weights, GradientSet& grads) {
  if (batch.empty() || batch.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, "batch and labels must be non-empty and equal length");
  grads = GradientSet::zeros_like(model);

  double loss_acc = 0.0;
  double weight_acc = 0.0;
  ForwardCache cache;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::uint8_t y = labels[i];
    const double w = class_weights[y];
    auto logits = forward(model, *batch[i], &cache);
    double m = std::max(logits[0], logits[1]);
    double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
    loss_acc += w * (lse - logits[y]);
    weight_acc += w;

    Matrix dlogits(1, 2);
    dlogits(0, 0) = std::exp(logits[0] - lse) - (y == 0 ? 1.0 : 0.0);
    dlogits(0, 1) = std::exp(logits[1] - lse) - (y == 1 ? 1.0 : 0.0);
    backward(model, cache, dlogits, model.layers.size(), w, grads);
  }
  grads.scale(1.0 / weight_acc);
  return loss_acc / weight_acc;
}

void sgd_step(NeuralModel& model, const GradientSet& grads, double learning_rate) {
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    Layer& layer = model.layers[i];
    if (!layer.has_params() || layer.frozen) continue;
    for (std::size_t j = 0; j < layer.weights.values.size(); ++j)
      layer.weights.values[j] -= learning_rate * grads.weights[i].values[j];
    for (std::size_t j = 0; j < layer.bias.values.size(); ++j)
      layer.bias.values[j] -= learning_rate * grads.bias[i].values[j];
  }
}

std::vector<double> predict_scores(const NeuralModel& model, const std::vector<Matrix>& inputs) {
  std::vector<double> scores;
  scores.reserve(inputs.size());
  for (const auto& x : inputs) {
    auto logits = forward(model, x);
    double m = std::max(logits[0], logits[1]);
    double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
    scores.push_back(std::exp(logits[1] - lse));
  }
  return scores;
}

namespace {

void validate_training_inputs(const std::vector<Matrix>& inputs,
                              const std::vector<std::uint8_t>& labels, const TrainConfig& cfg) {
  if (inputs.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, "inputs and labels differ in length");
  if (inputs.empty()) throw Error(ErrorCode::SingleClassTraining, "empty training set");
  bool has0 = false, has1 = false;
  for (std::uint8_t l : labels) (l ? has1 : has0) = true;
  if (!has0 || !has1)
    throw Error(ErrorCode::SingleClassTraining, "training labels contain a single class");
  if (cfg.learning_rate <= 0.0 || cfg.batch_size == 0)
    throw Error(ErrorCode::ConfigError, "learning_rate and batch_size must be positive");
  if (cfg.class_weights[0] <= 0.0 || cfg.class_weights[1] <= 0.0)
    throw Error(ErrorCode::ConfigError, "class weights must be positive");
}

}  // namespace

void run_epochs(std::size_t n_samples, const TrainConfig& cfg,
                const std::function<void(const std::vector<std::size_t>&)>& on_batch,
                const std::function<void(std::size_t)>& on_epoch_end) {
  Rng shuffle_rng(derive_seed(cfg.rng_seed, "shuffle"));
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t pos = 0; pos < n_samples; pos += cfg.batch_size) {
      std::size_t take = std::min(cfg.batch_size, n_samples - pos);
      batch.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                   order.begin() + static_cast<std::ptrdiff_t>(pos + take));
      on_batch(batch);
    }
    if (on_epoch_end) on_epoch_end(epoch);
  }
}

namespace {

NeuralModel train_on(NeuralModel model, const std::vector<Matrix>& inputs,
                     const std::vector<std::uint8_t>& labels, const TrainConfig& cfg,
                     const std::vector<Matrix>* val_inputs,
                     const std::vector<std::uint8_t>* val_labels) {
  validate_training_inputs(inputs, labels, cfg);
  for (const auto& x : inputs)
    if (x.cols() != model.input_channels || x.rows() < model.min_input_len)
      throw Error(ErrorCode::ShapeIncompatible, "training window shape does not fit the network");

  const bool track_best = val_inputs && val_labels && !val_inputs->empty();
  NeuralModel best = model;
  double best_f1 = -1.0;

  GradientSet grads;
  std::vector<const Matrix*> batch_ptrs;
  std::vector<std::uint8_t> batch_labels;
  run_epochs(
      inputs.size(), cfg,
      [&](const std::vector<std::size_t>& batch) {
        batch_ptrs.clear();
        batch_labels.clear();
        for (std::size_t idx : batch) {
          batch_ptrs.push_back(&inputs[idx]);
          batch_labels.push_back(labels[idx]);
        }
        double loss = forward_backward(model, batch_ptrs, batch_labels, cfg.class_weights, grads);
        if (!std::isfinite(loss))
          throw Error(ErrorCode::DivergedLoss, "training loss became non-finite");
        sgd_step(model, grads, cfg.learning_rate);
      },
      [&](std::size_t) {
        if (!track_best) return;
        auto scores = predict_scores(model, *val_inputs);
        std::vector<std::uint8_t> pred(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= 0.5 ? 1 : 0;
        double f1 = macro_f1(pred, *val_labels);
        if (f1 > best_f1) {
          best_f1 = f1;
          best = model;
        }
      });
  return track_best && best_f1 >= 0.0 ? best : model;
}

}  // namespace

NeuralModel train_neural(const std::vector<Matrix>& inputs, const std::vector<std::uint8_t>& labels,
                         const TrainConfig& cfg, const std::vector<Matrix>* val_inputs,
                         const std::vector<std::uint8_t>* val_labels) {
  if (inputs.empty()) throw Error(ErrorCode::SingleClassTraining, "empty training set");
  NeuralModel model = make_neural_model(inputs.front().cols(), derive_seed(cfg.rng_seed, "init"));
  return train_on(std::move(model), inputs, labels, cfg, val_inputs, val_labels);
}

NeuralModel transfer_finetune(const NeuralModel& pretrained, const std::vector<Matrix>& inputs,
                              const std::vector<std::uint8_t>& labels, std::size_t freeze_prefix,
                              const TrainConfig& cfg) {
  NeuralModel model = pretrained;
  for (const auto& x : inputs)
    if (x.cols() != model.input_channels || x.rows() < model.min_input_len)
      throw Error(ErrorCode::ShapeIncompatible,
                  "target windows do not fit the pretrained architecture");
  std::size_t seen = 0;
  for (auto& layer : model.layers)
    if (layer.has_params()) layer.frozen = seen++ < freeze_prefix;
  model = train_on(std::move(model), inputs, labels, cfg, nullptr, nullptr);
  for (auto& layer : model.layers) layer.frozen = false;
  return model;
}

std::array<double, 2> inverse_frequency_weights(const std::vector<std::uint8_t>& labels) {
  double n0 = 0.0, n1 = 0.0;
  for (std::uint8_t l : labels) (l ? n1 : n0) += 1.0;
  if (n0 == 0.0 || n1 == 0.0)
    throw Error(ErrorCode::SingleClassTraining, "both classes needed for class weights");
  const double n = n0 + n1;
  return {n / (2.0 * n0), n / (2.0 * n1)};
}

}  // namespace fogfair
