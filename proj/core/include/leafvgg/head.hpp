#pragma once

// Softmax-regression head trained on frozen convolutional features.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "leafvgg/tensor.hpp"

namespace leafvgg {

class WeightStore;

/// Dense layer W (K x F), b (K) followed by softmax.
struct HeadModel {
  Tensor weight;
  Tensor bias;

  std::size_t class_count() const { return weight.dim(0); }
  std::size_t feature_length() const { return weight.dim(1); }
};

/// W ~ U(-a, a) with a = sqrt(6 / (F + K)), strictly inside the bound; b = 0.
HeadModel init_head(std::size_t feature_length, std::size_t class_count, std::uint64_t seed);

/// Reads "head.weight"/"head.bias" from a store.
HeadModel head_from_store(const WeightStore& store);
/// Writes (or replaces) "head.weight"/"head.bias" in place.
void store_head(WeightStore& store, const HeadModel& head);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 50;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;

  void validate() const;
};

struct Gradients {
  double loss = 0.0;  ///< mean cross-entropy over the batch
  Tensor weight;
  Tensor bias;
};

/// Mean softmax cross-entropy of a batch (B x F features) and its gradient:
/// dW = (1/B) sum (p - onehot(y)) x^T, db = (1/B) sum (p - onehot(y)).
Gradients loss_and_grad(const HeadModel& model, const Tensor& features,
                        std::span<const std::size_t> labels);

struct Velocity {
  Tensor weight;
  Tensor bias;

  static Velocity zeros_like(const HeadModel& model);
};

/// v <- momentum * v - lr * g;  theta <- theta + v.
/// Throws NumericError if any gradient is NaN/Inf.
void sgd_step(HeadModel& model, const Gradients& grads, const TrainConfig& cfg, Velocity& velocity);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean loss and accuracy over N x F features.
Evaluation evaluate(const HeadModel& model, const Tensor& features,
                    std::span<const std::size_t> labels);

struct EpochStats {
  int epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  HeadModel model;
  std::vector<EpochStats> curve;
};

/// Supplies the training features for a given epoch (1-based). Used to feed
/// freshly augmented features; rows must stay aligned with the labels.
using EpochFeatureSource = std::function<Tensor(int epoch)>;

/// Mini-batch SGD for cfg.epochs epochs of ceil(N / batch) steps each. The
/// visiting order of epoch e is a shuffle by Prng::derive(seed, e). Stats
/// are full passes over both sets with the end-of-epoch parameters. The head
/// is initialised with init_head(F, class_count, cfg.seed).
TrainResult train(const Tensor& train_features, std::span<const std::size_t> train_labels,
                  const Tensor& val_features, std::span<const std::size_t> val_labels,
                  std::size_t class_count, const TrainConfig& cfg,
                  const EpochFeatureSource& source = {});

struct Prediction {
  Tensor probabilities;
  std::size_t label = 0;  ///< argmax, lowest index on ties
};

Prediction predict(const HeadModel& model, const Tensor& features);

/// Header "epoch,train_loss,train_acc,val_loss,val_acc", one row per epoch.
void write_curves_csv(std::ostream& out, std::span<const EpochStats> curve);
void save_curves_csv(std::span<const EpochStats> curve, const std::filesystem::path& path);

}  // namespace leafvgg
