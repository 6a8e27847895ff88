#pragma once

// Classification report assembled from a confusion matrix (and, optionally,
// class scores), with JSON, text table and CSV/SVG renderings.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "leafvgg/metrics.hpp"

namespace leafvgg {

struct ClassReport {
  std::vector<std::string> class_names;
  std::vector<ClassRates> classes;
  std::uint64_t total = 0;
  double accuracy = 0.0;
  Averages averages;
  std::optional<double> cohen_kappa;  ///< empty when undefined
  MccResult mcc;
  std::vector<RocCurve> roc;  ///< empty unless scores were given
};

/// scores, when given, must have the same class count as the matrix.
ClassReport build_report(const ConfusionMatrix& cm, const ScoreMatrix* scores = nullptr);

/// Drops digits past `places` decimals (no rounding). A 1e-9 nudge keeps
/// values such as 0.97 from landing on 0.969.
double truncate_decimals(double value, int places);
/// truncate_decimals(value, 3) printed as "0.975".
std::string format3(double value);

/// Full-precision JSON document.
std::string report_json(const ClassReport& report);
/// Per-class precision / recall / f1-score / support table followed by
/// accuracy, macro avg and weighted avg rows, 3 truncated decimals.
std::string report_table(const ClassReport& report);

std::string confusion_csv(const ConfusionMatrix& cm);
/// Heat grid, darker cells for larger row-normalised counts.
std::string confusion_svg(const ConfusionMatrix& cm);
/// Rows "class,fpr,tpr" for every curve point.
std::string roc_csv(const ClassReport& report);
/// Rows "class,jaccard".
std::string jaccard_csv(const ClassReport& report);

/// Writes report.json, report.txt, confusion.csv, confusion.svg, jaccard.csv
/// and, when ROC curves exist, roc.csv into dir.
void write_report_files(const ClassReport& report, const ConfusionMatrix& cm,
                        const std::filesystem::path& dir);

}  // namespace leafvgg
