#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "leafvgg/error.hpp"
#include "leafvgg/report.hpp"
#include "support.hpp"

using namespace leafvgg;
using leafvgg::testing::TempDir;

namespace {

ConfusionMatrix small() {
  ConfusionMatrix cm(std::vector<std::string>{"oak", "elm, wych"});
  cm.add(0, 0, 3);
  cm.add(0, 1, 1);
  cm.add(1, 1, 4);
  return cm;
}

}  // namespace

TEST(Truncate, DropsDigitsWithoutRounding) {
  EXPECT_EQ(format3(40.0 / 41.0), "0.975");  // 0.97561
  EXPECT_EQ(format3(32.0 / 33.0), "0.969");  // 0.96970
  EXPECT_EQ(format3(0.97), "0.970");
  EXPECT_EQ(format3(1.0), "1.000");
  EXPECT_EQ(format3(0.0), "0.000");
  EXPECT_DOUBLE_EQ(truncate_decimals(0.9999, 2), 0.99);
  EXPECT_DOUBLE_EQ(truncate_decimals(-0.1239, 3), -0.123);
}

TEST(Report, JsonSchemaAndValues) {
  const ConfusionMatrix cm = small();
  const ScoreMatrix scores({0.9, 0.1, 0.8, 0.2, 0.6, 0.4, 0.3, 0.7, 0.1, 0.9, 0.2, 0.8, 0.4, 0.6, 0.45, 0.55},
                           {0, 0, 0, 0, 1, 1, 1, 1}, 2);
  const ClassReport r = build_report(cm, &scores);
  const auto doc = nlohmann::json::parse(report_json(r));
  ASSERT_EQ(doc["classes"].size(), 2u);
  EXPECT_EQ(doc["classes"][1]["name"], "elm, wych");
  EXPECT_EQ(doc["classes"][0]["support"], 4);
  EXPECT_DOUBLE_EQ(doc["classes"][1]["precision"].get<double>(), 0.8);
  for (const char* key : {"precision", "recall", "f1", "specificity", "jaccard"}) {
    EXPECT_TRUE(doc["classes"][0].contains(key)) << key;
  }
  EXPECT_DOUBLE_EQ(doc["accuracy"].get<double>(), 7.0 / 8.0);
  EXPECT_TRUE(doc["macro_avg"].contains("f1"));
  EXPECT_TRUE(doc["weighted_avg"].contains("recall"));
  EXPECT_TRUE(doc["cohen_kappa"].is_number());
  EXPECT_TRUE(doc["mcc_multiclass"].is_number());
  ASSERT_EQ(doc["auc"].size(), 2u);
  EXPECT_TRUE(doc["auc"][0]["auc"].is_number());
}

TEST(Report, UndefinedKappaIsNull) {
  ConfusionMatrix cm(2);
  cm.add(0, 0, 5);
  const ClassReport r = build_report(cm);
  EXPECT_FALSE(r.cohen_kappa.has_value());
  EXPECT_TRUE(nlohmann::json::parse(report_json(r))["cohen_kappa"].is_null());
  EXPECT_NE(report_table(r).find("cohen kappa      undefined"), std::string::npos);
}

TEST(Report, ScoresMustMatchClassCount) {
  const ScoreMatrix s({0.2, 0.3, 0.5}, {0}, 3);
  EXPECT_THROW(build_report(small(), &s), ConfigError);
}

TEST(Report, TableRows) {
  const std::string table = report_table(build_report(small()));
  std::istringstream in(table);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_GE(lines.size(), 9u);
  EXPECT_NE(lines[0].find("precision"), std::string::npos);
  EXPECT_NE(lines[0].find("f1-score"), std::string::npos);
  // oak: precision 1, recall 0.75, f1 0.857142...
  EXPECT_NE(lines[2].find("oak      1.000      0.750      0.857          4"), std::string::npos)
      << lines[2];
  EXPECT_NE(table.find("accuracy"), std::string::npos);
  EXPECT_NE(table.find("macro avg"), std::string::npos);
  EXPECT_NE(table.find("weighted avg"), std::string::npos);
}

TEST(Report, ConfusionCsvQuotesNames) {
  EXPECT_EQ(confusion_csv(small()),
            "actual\\predicted,oak,\"elm, wych\"\n"
            "oak,3,1\n"
            "\"elm, wych\",0,4\n");
}

TEST(Report, JaccardAndRocCsv) {
  const ScoreMatrix scores({0.9, 0.1, 0.2, 0.8}, {0, 1}, 2);
  ConfusionMatrix cm(2);
  cm.add(0, 0);
  cm.add(1, 1);
  const ClassReport r = build_report(cm, &scores);
  EXPECT_EQ(jaccard_csv(r), "class,jaccard\n0,1.000000\n1,1.000000\n");
  const std::string roc = roc_csv(r);
  EXPECT_EQ(roc.substr(0, 14), "class,fpr,tpr\n");
  EXPECT_NE(roc.find("0,0.000000,0.000000\n"), std::string::npos);
  EXPECT_NE(roc.find("0,1.000000,1.000000\n"), std::string::npos);
}

TEST(Report, SvgIsWellFormedEnough) {
  const std::string svg = confusion_svg(ConfusionMatrix(std::vector<std::string>{"a<b", "c"}));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Report, WritesAllFiles) {
  TempDir dir;
  const ClassReport plain = build_report(small());
  write_report_files(plain, small(), dir / "r");
  for (const char* f : {"report.json", "report.txt", "confusion.csv", "confusion.svg", "jaccard.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "r" / f)) << f;
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "r" / "roc.csv"));
}
