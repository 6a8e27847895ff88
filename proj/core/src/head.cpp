#include "leafvgg/head.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "leafvgg/error.hpp"
#include "leafvgg/ops.hpp"
#include "leafvgg/prng.hpp"
#include "leafvgg/weights.hpp"

namespace leafvgg {

HeadModel init_head(std::size_t feature_length, std::size_t class_count, std::uint64_t seed) {
  if (feature_length == 0 || class_count == 0) {
    throw ConfigError("init_head: feature length and class count must be positive");
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(feature_length + class_count));
  HeadModel m{Tensor({class_count, feature_length}), Tensor({class_count})};
  Prng rng(seed);
  for (float& w : m.weight.data()) {
    float v = static_cast<float>(bound * (2.0 * rng.uniform_open01() - 1.0));
    while (std::abs(v) >= bound) v = std::nextafter(v, 0.0f);
    w = v;
  }
  return m;
}

HeadModel head_from_store(const WeightStore& store) {
  HeadModel m{store.at("head.weight"), store.at("head.bias")};
  if (m.weight.rank() != 2 || m.bias.rank() != 1 || m.bias.dim(0) != m.weight.dim(0)) {
    throw FormatError(FormatErrc::shape_mismatch,
                      "head tensors disagree: weight " + to_string(m.weight.shape()) + ", bias " +
                          to_string(m.bias.shape()),
                      "head.weight");
  }
  return m;
}

void store_head(WeightStore& store, const HeadModel& head) {
  store.set("head.weight", head.weight);
  store.set("head.bias", head.bias);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train.learning_rate must be a finite non-negative number");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must lie in [0, 1)");
}

namespace {

void check_batch(const HeadModel& model, const Tensor& features,
                 std::span<const std::size_t> labels) {
  if (features.rank() != 2 || features.dim(1) != model.feature_length()) {
    throw ShapeError("head expects B x " + std::to_string(model.feature_length()) +
                     " features, got " + to_string(features.shape()));
  }
  if (labels.size() != features.dim(0)) {
    throw ShapeError("batch has " + std::to_string(features.dim(0)) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  for (auto y : labels) {
    if (y >= model.class_count()) {
      throw ConfigError("label " + std::to_string(y) + " outside [0, " +
                        std::to_string(model.class_count()) + ")");
    }
  }
}

// Row-wise softmax of float logits, evaluated in double.
std::vector<double> softmax_rows(const Tensor& logits) {
  const std::size_t rows = logits.dim(0), k_count = logits.dim(1);
  std::vector<double> p(rows * k_count);
  for (std::size_t r = 0; r < rows; ++r) {
    const float* z = logits.data().data() + r * k_count;
    double peak = z[0];
    for (std::size_t k = 1; k < k_count; ++k) peak = std::max(peak, static_cast<double>(z[k]));
    double total = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      p[r * k_count + k] = std::exp(static_cast<double>(z[k]) - peak);
      total += p[r * k_count + k];
    }
    for (std::size_t k = 0; k < k_count; ++k) p[r * k_count + k] /= total;
  }
  return p;
}

}  // namespace

Gradients loss_and_grad(const HeadModel& model, const Tensor& features,
                        std::span<const std::size_t> labels) {
  check_batch(model, features, labels);
  const std::size_t batch = features.dim(0);
  const std::size_t k_count = model.class_count();
  const std::size_t f_count = model.feature_length();

  const Tensor logits = dense_batch(features, model.weight, model.bias);
  std::vector<double> delta = softmax_rows(logits);
  const double inv_batch = 1.0 / static_cast<double>(batch);
  double loss = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    loss -= std::log(std::max(delta[b * k_count + labels[b]], kProbabilityFloor));
    delta[b * k_count + labels[b]] -= 1.0;
    for (std::size_t k = 0; k < k_count; ++k) delta[b * k_count + k] *= inv_batch;
  }

  Gradients g{loss * inv_batch, Tensor({k_count, f_count}), Tensor({k_count})};
  const float* x = features.data().data();
#pragma omp parallel
  {
    std::vector<double> acc(f_count);
#pragma omp for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(k_count); ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      std::fill(acc.begin(), acc.end(), 0.0);
      double bias_acc = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const double d = delta[b * k_count + k];
        bias_acc += d;
        const float* row = x + b * f_count;
        for (std::size_t f = 0; f < f_count; ++f) acc[f] += d * static_cast<double>(row[f]);
      }
      float* gw = g.weight.data().data() + k * f_count;
      for (std::size_t f = 0; f < f_count; ++f) gw[f] = static_cast<float>(acc[f]);
      g.bias[k] = static_cast<float>(bias_acc);
    }
  }
  return g;
}

Velocity Velocity::zeros_like(const HeadModel& model) {
  return {Tensor(model.weight.shape()), Tensor(model.bias.shape())};
}

void sgd_step(HeadModel& model, const Gradients& grads, const TrainConfig& cfg,
              Velocity& velocity) {
  expect_shape(grads.weight, model.weight.shape(), "weight gradient");
  expect_shape(grads.bias, model.bias.shape(), "bias gradient");
  expect_shape(velocity.weight, model.weight.shape(), "weight velocity");
  expect_shape(velocity.bias, model.bias.shape(), "bias velocity");
  auto finite = [](std::span<const float> s) {
    return std::all_of(s.begin(), s.end(), [](float v) { return std::isfinite(v); });
  };
  if (!finite(grads.weight.data()) || !finite(grads.bias.data()) || !std::isfinite(grads.loss)) {
    throw NumericError("non-finite gradient (loss " + std::to_string(grads.loss) +
                       "); training diverged, lower train.learning_rate");
  }
  auto update = [&](std::span<float> theta, std::span<const float> g, std::span<float> v) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = static_cast<float>(cfg.momentum * v[i] - cfg.learning_rate * g[i]);
      theta[i] += v[i];
    }
  };
  update(model.weight.data(), grads.weight.data(), velocity.weight.data());
  update(model.bias.data(), grads.bias.data(), velocity.bias.data());
}

Evaluation evaluate(const HeadModel& model, const Tensor& features,
                    std::span<const std::size_t> labels) {
  check_batch(model, features, labels);
  const Tensor logits = dense_batch(features, model.weight, model.bias);
  const std::vector<double> p = softmax_rows(logits);
  const std::size_t rows = features.dim(0), k_count = model.class_count();
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    loss -= std::log(std::max(p[r * k_count + labels[r]], kProbabilityFloor));
    if (argmax(logits.row(r)) == labels[r]) ++correct;
  }
  return {loss / static_cast<double>(rows),
          static_cast<double>(correct) / static_cast<double>(rows)};
}

namespace {

Tensor gather_rows(const Tensor& features, std::span<const std::size_t> rows) {
  const std::size_t f_count = features.dim(1);
  Tensor out({rows.size(), f_count});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = features.row(rows[i]);
    std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * f_count));
  }
  return out;
}

}  // namespace

TrainResult train(const Tensor& train_features, std::span<const std::size_t> train_labels,
                  const Tensor& val_features, std::span<const std::size_t> val_labels,
                  std::size_t class_count, const TrainConfig& cfg,
                  const EpochFeatureSource& source) {
  cfg.validate();
  if (train_features.rank() != 2) {
    throw ShapeError("training features must be N x F, got " + to_string(train_features.shape()));
  }
  const std::size_t n = train_features.dim(0);
  const std::size_t f_count = train_features.dim(1);
  if (train_labels.size() != n) throw ShapeError("training labels do not match feature rows");

  TrainResult result{init_head(f_count, class_count, cfg.seed), {}};
  Velocity velocity = Velocity::zeros_like(result.model);
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::size_t> order(n);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Tensor epoch_features = source ? source(epoch) : Tensor({1});
    const Tensor& features = source ? epoch_features : train_features;
    expect_shape(features, train_features.shape(), "epoch training features");

    std::iota(order.begin(), order.end(), 0);
    if (cfg.shuffle_each_epoch) {
      Prng rng = Prng::derive(cfg.seed, static_cast<std::uint64_t>(epoch));
      rng.shuffle(std::span<std::size_t>(order));
    }
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t stop = std::min(n, start + batch_size);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      std::vector<std::size_t> labels(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = train_labels[rows[i]];
      const Gradients g = loss_and_grad(result.model, gather_rows(features, rows), labels);
      sgd_step(result.model, g, cfg, velocity);
    }
    const Evaluation tr = evaluate(result.model, features, train_labels);
    const Evaluation va = evaluate(result.model, val_features, val_labels);
    result.curve.push_back({epoch, tr.loss, tr.accuracy, va.loss, va.accuracy});
  }
  return result;
}

Prediction predict(const HeadModel& model, const Tensor& features) {
  if (features.size() != model.feature_length()) {
    throw ShapeError("predict: expected " + std::to_string(model.feature_length()) +
                     " features, got " + to_string(features.shape()));
  }
  const Tensor logits = dense(features, model.weight, model.bias);
  return {softmax(logits), argmax(logits.data())};
}

void write_curves_csv(std::ostream& out, std::span<const EpochStats> curve) {
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  char line[160];
  for (const auto& s : curve) {
    std::snprintf(line, sizeof line, "%d,%.6f,%.6f,%.6f,%.6f\n", s.epoch, s.train_loss,
                  s.train_accuracy, s.val_loss, s.val_accuracy);
    out << line;
  }
}

void save_curves_csv(std::span<const EpochStats> curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrc::io, "cannot write " + path.string());
  write_curves_csv(out, curve);
}

}  // namespace leafvgg
