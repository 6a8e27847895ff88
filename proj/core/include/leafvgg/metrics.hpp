#pragma once

// Multi-class evaluation: confusion matrix, one-vs-rest rates, agreement
// coefficients and ROC analysis.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace leafvgg {

/// K x K counts indexed [actual][predicted], K >= 2.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> class_names);
  /// Classes named "0".."K-1".
  explicit ConfusionMatrix(std::size_t class_count);

  void add(std::size_t actual, std::size_t predicted, std::uint64_t count = 1);

  std::uint64_t at(std::size_t actual, std::size_t predicted) const;
  std::size_t class_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& class_names() const noexcept { return names_; }

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t actual) const;
  std::uint64_t column_sum(std::size_t predicted) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::uint64_t> counts_;
};

/// Throws ConfigError on unequal lengths or an index >= class count.
ConfusionMatrix confusion(std::span<const std::size_t> labels,
                          std::span<const std::size_t> predictions, std::size_t class_count);
ConfusionMatrix confusion(std::span<const std::size_t> labels,
                          std::span<const std::size_t> predictions,
                          std::vector<std::string> class_names);

/// Bits set in ClassRates::undefined when a ratio had a zero denominator
/// (the value is then reported as 0).
enum RateFlag : unsigned {
  kPrecisionUndefined = 1u << 0,
  kRecallUndefined = 1u << 1,
  kF1Undefined = 1u << 2,
  kSpecificityUndefined = 1u << 3,
  kJaccardUndefined = 1u << 4,
};

/// One-vs-rest reduction of a single class.
struct ClassRates {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;    // TP / (TP + FP)
  double recall = 0.0;       // TP / (TP + FN), a.k.a. sensitivity
  double f1 = 0.0;           // 2PR / (P + R)
  double specificity = 0.0;  // TN / (TN + FP)
  double jaccard = 0.0;      // TP / (TP + FN + FP)
  std::uint64_t support = 0;  // TP + FN
  unsigned undefined = 0;
};

std::vector<ClassRates> per_class_rates(const ConfusionMatrix& cm);

/// trace / total. Throws NumericError on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

/// (p_o - p_e) / (1 - p_e) with p_e = sum_k row_k * col_k / N^2.
/// Throws NumericError when the matrix is empty or p_e == 1.
double cohen_kappa(const ConfusionMatrix& cm);

struct MccResult {
  std::vector<double> per_class;   ///< binary MCC of each class against the rest
  std::vector<bool> undefined;     ///< zero denominator, value reported as 0
  double mean_ovr = 0.0;
  double multiclass = 0.0;         ///< Gorodkin's R_K over the full matrix
};

MccResult mcc(const ConfusionMatrix& cm);

struct AveragedRates {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Averages {
  AveragedRates macro;     ///< unweighted mean over classes
  AveragedRates weighted;  ///< weighted by support
};

Averages averages(std::span<const ClassRates> rates);

/// N x K class scores with the true label of each row.
class ScoreMatrix {
 public:
  /// Throws ConfigError unless scores.size() == labels.size() * K, every label
  /// is < K, and every row sums to 1 within 1e-4.
  ScoreMatrix(std::vector<double> scores, std::vector<std::size_t> labels, std::size_t class_count);

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t class_count() const noexcept { return class_count_; }
  double score(std::size_t row, std::size_t k) const { return scores_[row * class_count_ + k]; }
  std::size_t label(std::size_t row) const { return labels_[row]; }

 private:
  std::vector<double> scores_;
  std::vector<std::size_t> labels_;
  std::size_t class_count_;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::size_t class_index = 0;
  /// Empty when the class has no positives or no negatives.
  std::optional<double> auc;
  std::vector<RocPoint> points;  ///< from (0,0) to (1,1), one step per distinct score
};

/// One-vs-rest ROC per class. Tied scores form a single diagonal step, so the
/// trapezoidal area equals the Mann-Whitney statistic with ties counted 1/2.
std::vector<RocCurve> roc_auc(const ScoreMatrix& scores);

}  // namespace leafvgg
