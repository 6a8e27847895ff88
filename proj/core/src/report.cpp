#include "leafvgg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "leafvgg/error.hpp"

namespace fs = std::filesystem;

namespace leafvgg {

ClassReport build_report(const ConfusionMatrix& cm, const ScoreMatrix* scores) {
  ClassReport r;
  r.class_names = cm.class_names();
  r.classes = per_class_rates(cm);
  r.total = cm.total();
  r.accuracy = accuracy(cm);
  r.averages = averages(r.classes);
  try {
    r.cohen_kappa = cohen_kappa(cm);
  } catch (const NumericError&) {
    r.cohen_kappa.reset();
  }
  r.mcc = mcc(cm);
  if (scores) {
    if (scores->class_count() != cm.class_count()) {
      throw ConfigError("scores have " + std::to_string(scores->class_count()) +
                        " classes, the confusion matrix " + std::to_string(cm.class_count()));
    }
    r.roc = roc_auc(*scores);
  }
  return r;
}

double truncate_decimals(double value, int places) {
  const double scale = std::pow(10.0, places);
  const double scaled = value * scale;
  const double t = scaled >= 0.0 ? std::floor(scaled + 1e-9) : std::ceil(scaled - 1e-9);
  return t / scale;
}

std::string format3(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", truncate_decimals(value, 3));
  return buf;
}

namespace {

using nlohmann::ordered_json;

ordered_json averaged(const AveragedRates& a) {
  return {{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrc::io, "cannot write " + path.string());
  out << text;
  if (!out) throw DataError(DataErrc::io, "failed writing " + path.string());
}

}  // namespace

std::string report_json(const ClassReport& report) {
  ordered_json doc;
  ordered_json classes = ordered_json::array();
  for (std::size_t k = 0; k < report.classes.size(); ++k) {
    const auto& c = report.classes[k];
    classes.push_back({{"name", report.class_names[k]},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"specificity", c.specificity},
                       {"jaccard", c.jaccard},
                       {"support", c.support}});
  }
  doc["classes"] = std::move(classes);
  doc["accuracy"] = report.accuracy;
  doc["macro_avg"] = averaged(report.averages.macro);
  doc["weighted_avg"] = averaged(report.averages.weighted);
  doc["cohen_kappa"] = report.cohen_kappa ? ordered_json(*report.cohen_kappa) : ordered_json(nullptr);
  doc["mcc_mean_ovr"] = report.mcc.mean_ovr;
  doc["mcc_multiclass"] = report.mcc.multiclass;
  ordered_json auc = ordered_json::array();
  for (const auto& curve : report.roc) {
    auc.push_back({{"name", report.class_names[curve.class_index]},
                   {"auc", curve.auc ? ordered_json(*curve.auc) : ordered_json(nullptr)}});
  }
  doc["auc"] = std::move(auc);
  return doc.dump(2) + "\n";
}

std::string report_table(const ClassReport& report) {
  std::size_t name_width = std::string("weighted avg").size();
  for (const auto& n : report.class_names) name_width = std::max(name_width, n.size());
  const int w = static_cast<int>(name_width);

  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%*s %10s %10s %10s %10s\n\n", w, "", "precision", "recall",
                "f1-score", "support");
  out << line;
  for (std::size_t k = 0; k < report.classes.size(); ++k) {
    const auto& c = report.classes[k];
    std::snprintf(line, sizeof line, "%*s %10s %10s %10s %10llu\n", w,
                  report.class_names[k].c_str(), format3(c.precision).c_str(),
                  format3(c.recall).c_str(), format3(c.f1).c_str(),
                  static_cast<unsigned long long>(c.support));
    out << line;
  }
  out << '\n';
  const auto total = static_cast<unsigned long long>(report.total);
  std::snprintf(line, sizeof line, "%*s %10s %10s %10s %10llu\n", w, "accuracy", "", "",
                format3(report.accuracy).c_str(), total);
  out << line;
  auto avg_row = [&](const char* label, const AveragedRates& a) {
    std::snprintf(line, sizeof line, "%*s %10s %10s %10s %10llu\n", w, label,
                  format3(a.precision).c_str(), format3(a.recall).c_str(), format3(a.f1).c_str(),
                  total);
    out << line;
  };
  avg_row("macro avg", report.averages.macro);
  avg_row("weighted avg", report.averages.weighted);
  out << '\n';
  if (report.cohen_kappa) {
    out << "cohen kappa      " << format3(*report.cohen_kappa) << '\n';
  } else {
    out << "cohen kappa      undefined\n";
  }
  out << "mcc (mean ovr)   " << format3(report.mcc.mean_ovr) << '\n';
  out << "mcc (multiclass) " << format3(report.mcc.multiclass) << '\n';
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "actual\\predicted";
  for (const auto& n : cm.class_names()) out << ',' << csv_field(n);
  out << '\n';
  for (std::size_t a = 0; a < cm.class_count(); ++a) {
    out << csv_field(cm.class_names()[a]);
    for (std::size_t p = 0; p < cm.class_count(); ++p) out << ',' << cm.at(a, p);
    out << '\n';
  }
  return out.str();
}

std::string confusion_svg(const ConfusionMatrix& cm) {
  const std::size_t k = cm.class_count();
  const int cell = 36;
  const int margin = 160;
  const int side = margin + static_cast<int>(k) * cell + 10;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < k; ++i) {
    const int offset = margin + static_cast<int>(i) * cell + cell / 2;
    const std::string name = xml_escape(cm.class_names()[i]);
    out << "<text x=\"" << margin - 6 << "\" y=\"" << offset + 4 << "\" text-anchor=\"end\">" << name
        << "</text>\n";
    out << "<text transform=\"translate(" << offset + 4 << ',' << margin - 6
        << ") rotate(-60)\">" << name << "</text>\n";
  }
  for (std::size_t a = 0; a < k; ++a) {
    const double row = static_cast<double>(cm.row_sum(a));
    for (std::size_t p = 0; p < k; ++p) {
      const std::uint64_t count = cm.at(a, p);
      const double frac = row > 0.0 ? static_cast<double>(count) / row : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - frac)));
      const int x = margin + static_cast<int>(p) * cell;
      const int y = margin + static_cast<int>(a) * cell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#999\"/>\n";
      out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
          << "\" text-anchor=\"middle\" fill=\"" << (frac > 0.5 ? "white" : "black") << "\">"
          << count << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string roc_csv(const ClassReport& report) {
  std::ostringstream out;
  out << "class,fpr,tpr\n";
  char buf[64];
  for (const auto& curve : report.roc) {
    const std::string name = csv_field(report.class_names[curve.class_index]);
    for (const auto& pt : curve.points) {
      std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", pt.fpr, pt.tpr);
      out << name << buf;
    }
  }
  return out.str();
}

std::string jaccard_csv(const ClassReport& report) {
  std::ostringstream out;
  out << "class,jaccard\n";
  char buf[32];
  for (std::size_t k = 0; k < report.classes.size(); ++k) {
    std::snprintf(buf, sizeof buf, ",%.6f\n", report.classes[k].jaccard);
    out << csv_field(report.class_names[k]) << buf;
  }
  return out.str();
}

void write_report_files(const ClassReport& report, const ConfusionMatrix& cm, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "report.json", report_json(report));
  write_text(dir / "report.txt", report_table(report));
  write_text(dir / "confusion.csv", confusion_csv(cm));
  write_text(dir / "confusion.svg", confusion_svg(cm));
  write_text(dir / "jaccard.csv", jaccard_csv(report));
  if (!report.roc.empty()) write_text(dir / "roc.csv", roc_csv(report));
}

}  // namespace leafvgg
