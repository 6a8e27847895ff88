#include "leafvgg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leafvgg/error.hpp"

namespace leafvgg {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : names_(std::move(class_names)) {
  if (names_.size() < 2) throw ConfigError("a confusion matrix needs at least two classes");
  counts_.assign(names_.size() * names_.size(), 0);
}

namespace {

std::vector<std::string> numbered(std::size_t k) {
  std::vector<std::string> names(k);
  for (std::size_t i = 0; i < k; ++i) names[i] = std::to_string(i);
  return names;
}

double ratio(std::uint64_t num, std::uint64_t den, unsigned flag, unsigned& undefined) {
  if (den == 0) {
    undefined |= flag;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t class_count) : ConfusionMatrix(numbered(class_count)) {}

void ConfusionMatrix::add(std::size_t actual, std::size_t predicted, std::uint64_t count) {
  const std::size_t k = class_count();
  if (actual >= k || predicted >= k) {
    throw ConfigError("class index out of range: actual " + std::to_string(actual) +
                      ", predicted " + std::to_string(predicted) + ", classes " +
                      std::to_string(k));
  }
  counts_[actual * k + predicted] += count;
}

std::uint64_t ConfusionMatrix::at(std::size_t actual, std::size_t predicted) const {
  return counts_.at(actual * class_count() + predicted);
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t k = 0; k < class_count(); ++k) t += at(k, k);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t actual) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < class_count(); ++p) s += at(actual, p);
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::uint64_t s = 0;
  for (std::size_t a = 0; a < class_count(); ++a) s += at(a, predicted);
  return s;
}

ConfusionMatrix confusion(std::span<const std::size_t> labels,
                          std::span<const std::size_t> predictions,
                          std::vector<std::string> class_names) {
  if (labels.size() != predictions.size()) {
    throw ConfigError("confusion: " + std::to_string(labels.size()) + " labels but " +
                      std::to_string(predictions.size()) + " predictions");
  }
  ConfusionMatrix cm(std::move(class_names));
  for (std::size_t i = 0; i < labels.size(); ++i) cm.add(labels[i], predictions[i]);
  return cm;
}

ConfusionMatrix confusion(std::span<const std::size_t> labels,
                          std::span<const std::size_t> predictions, std::size_t class_count) {
  return confusion(labels, predictions, numbered(class_count));
}

std::vector<ClassRates> per_class_rates(const ConfusionMatrix& cm) {
  const std::uint64_t n = cm.total();
  std::vector<ClassRates> out(cm.class_count());
  for (std::size_t k = 0; k < cm.class_count(); ++k) {
    ClassRates& r = out[k];
    r.tp = cm.at(k, k);
    r.fn = cm.row_sum(k) - r.tp;
    r.fp = cm.column_sum(k) - r.tp;
    r.tn = n - r.tp - r.fn - r.fp;
    r.support = r.tp + r.fn;
    r.precision = ratio(r.tp, r.tp + r.fp, kPrecisionUndefined, r.undefined);
    r.recall = ratio(r.tp, r.tp + r.fn, kRecallUndefined, r.undefined);
    r.specificity = ratio(r.tn, r.tn + r.fp, kSpecificityUndefined, r.undefined);
    r.jaccard = ratio(r.tp, r.tp + r.fn + r.fp, kJaccardUndefined, r.undefined);
    if (r.precision + r.recall > 0.0) {
      r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    } else {
      r.f1 = 0.0;
      r.undefined |= kF1Undefined;
    }
  }
  return out;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t n = cm.total();
  if (n == 0) throw NumericError("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(n);
}

double cohen_kappa(const ConfusionMatrix& cm) {
  const std::uint64_t n = cm.total();
  if (n == 0) throw NumericError("kappa of an empty confusion matrix");
  // Integer numerators keep p_e == 1 exact.
  std::uint64_t chance = 0;
  for (std::size_t k = 0; k < cm.class_count(); ++k) chance += cm.row_sum(k) * cm.column_sum(k);
  const std::uint64_t n2 = n * n;
  if (chance == n2) {
    throw NumericError("kappa undefined: expected agreement is 1 (a single class in use)");
  }
  const double po = static_cast<double>(cm.trace()) / static_cast<double>(n);
  const double pe = static_cast<double>(chance) / static_cast<double>(n2);
  return (po - pe) / (1.0 - pe);
}

MccResult mcc(const ConfusionMatrix& cm) {
  MccResult out;
  const auto rates = per_class_rates(cm);
  for (const auto& r : rates) {
    const double tp = static_cast<double>(r.tp), tn = static_cast<double>(r.tn);
    const double fp = static_cast<double>(r.fp), fn = static_cast<double>(r.fn);
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (den == 0.0) {
      out.per_class.push_back(0.0);
      out.undefined.push_back(true);
    } else {
      out.per_class.push_back((tp * tn - fp * fn) / std::sqrt(den));
      out.undefined.push_back(false);
    }
  }
  out.mean_ovr = out.per_class.empty()
                     ? 0.0
                     : std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) /
                           static_cast<double>(out.per_class.size());

  const double s = static_cast<double>(cm.total());
  const double c = static_cast<double>(cm.trace());
  double pt = 0.0, pp = 0.0, tt = 0.0;
  for (std::size_t k = 0; k < cm.class_count(); ++k) {
    const double t_k = static_cast<double>(cm.row_sum(k));
    const double p_k = static_cast<double>(cm.column_sum(k));
    pt += p_k * t_k;
    pp += p_k * p_k;
    tt += t_k * t_k;
  }
  const double den = (s * s - pp) * (s * s - tt);
  out.multiclass = den > 0.0 ? (c * s - pt) / std::sqrt(den) : 0.0;
  return out;
}

Averages averages(std::span<const ClassRates> rates) {
  Averages a;
  if (rates.empty()) return a;
  double support = 0.0;
  for (const auto& r : rates) {
    a.macro.precision += r.precision;
    a.macro.recall += r.recall;
    a.macro.f1 += r.f1;
    const double w = static_cast<double>(r.support);
    a.weighted.precision += w * r.precision;
    a.weighted.recall += w * r.recall;
    a.weighted.f1 += w * r.f1;
    support += w;
  }
  const double k = static_cast<double>(rates.size());
  a.macro.precision /= k;
  a.macro.recall /= k;
  a.macro.f1 /= k;
  if (support > 0.0) {
    a.weighted.precision /= support;
    a.weighted.recall /= support;
    a.weighted.f1 /= support;
  }
  return a;
}

ScoreMatrix::ScoreMatrix(std::vector<double> scores, std::vector<std::size_t> labels,
                         std::size_t class_count)
    : scores_(std::move(scores)), labels_(std::move(labels)), class_count_(class_count) {
  if (class_count_ < 2) throw ConfigError("score matrix needs at least two classes");
  if (scores_.size() != labels_.size() * class_count_) {
    throw ConfigError("score matrix holds " + std::to_string(scores_.size()) + " values, expected " +
                      std::to_string(labels_.size()) + " x " + std::to_string(class_count_));
  }
  for (std::size_t r = 0; r < labels_.size(); ++r) {
    if (labels_[r] >= class_count_) {
      throw ConfigError("score row " + std::to_string(r) + ": label out of range");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < class_count_; ++k) {
      const double v = scores_[r * class_count_ + k];
      if (!std::isfinite(v)) throw ConfigError("score row " + std::to_string(r) + " is not finite");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-4) {
      throw ConfigError("score row " + std::to_string(r) + " sums to " + std::to_string(total) +
                        ", expected 1");
    }
  }
}

std::vector<RocCurve> roc_auc(const ScoreMatrix& scores) {
  std::vector<RocCurve> out;
  const std::size_t n = scores.rows();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < scores.class_count(); ++k) {
    RocCurve curve;
    curve.class_index = k;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) positives += scores.label(i) == k;
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
      out.push_back(std::move(curve));
      continue;
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores.score(a, k) > scores.score(b, k);
    });
    double tp = 0.0, fp = 0.0, area = 0.0;
    RocPoint prev{0.0, 0.0};
    curve.points.push_back(prev);
    for (std::size_t i = 0; i < n;) {
      const double threshold = scores.score(order[i], k);
      for (; i < n && scores.score(order[i], k) == threshold; ++i) {
        (scores.label(order[i]) == k ? tp : fp) += 1.0;
      }
      const RocPoint next{fp / static_cast<double>(negatives), tp / static_cast<double>(positives)};
      area += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) * 0.5;
      curve.points.push_back(next);
      prev = next;
    }
    curve.auc = area;
    out.push_back(std::move(curve));
  }
  return out;
}

}  // namespace leafvgg
