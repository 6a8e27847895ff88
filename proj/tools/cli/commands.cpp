#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "leafvgg/dataset.hpp"
#include "leafvgg/error.hpp"
#include "leafvgg/features.hpp"
#include "leafvgg/interchange.hpp"
#include "leafvgg/model.hpp"
#include "leafvgg/ops.hpp"
#include "leafvgg/prng.hpp"
#include "leafvgg/report.hpp"
#include "leafvgg/weights.hpp"

namespace fs = std::filesystem;

namespace leafvgg::cli {

namespace {

constexpr std::size_t kDefaultClassCount = 15;

fs::path in_output(const RunConfig& cfg, const char* name) { return cfg.output_dir / name; }

std::vector<std::string> load_classes(const RunConfig& cfg) {
  const fs::path p = in_output(cfg, files::kClasses);
  if (!fs::exists(p)) {
    throw DataError(DataErrc::missing_path, p.string() + " not found; run `leafvgg ingest` first");
  }
  return load_class_list(p);
}

std::size_t default_class_count(const RunConfig& cfg) {
  const fs::path p = in_output(cfg, files::kClasses);
  return fs::exists(p) ? load_class_list(p).size() : kDefaultClassCount;
}

fs::path dataset_root(const RunConfig& cfg) {
  if (cfg.dataset_root.empty()) throw ConfigError("data.root is not set (use --dataset)");
  return cfg.dataset_root;
}

Tensor load_input(const RunConfig& cfg, const fs::path& path) {
  return preprocess(decode_image(path), cfg.input_side, cfg.normalization);
}

std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError(DataErrc::io, "cannot write " + path.string());
  f << text;
  if (!f) throw DataError(DataErrc::io, "failed writing " + path.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  for (auto& f : fields) {
    const auto a = f.find_first_not_of(" \t");
    const auto b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? std::string() : f.substr(a, b - a + 1);
  }
  return fields;
}

std::optional<std::size_t> as_index(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
}

void finish_report(const ConfusionMatrix& cm, const ScoreMatrix* scores, const RunConfig& cfg,
                   std::ostream& out) {
  const ClassReport report = build_report(cm, scores);
  write_report_files(report, cm, cfg.output_dir);
  out << report_table(report);
  out << "accuracy " << fixed(report.accuracy, 4) << " (" << cm.trace() << "/" << cm.total()
      << "), report written to " << cfg.output_dir.string() << "\n";
}

struct PredictionRows {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> predictions;
  std::vector<double> scores;
  std::size_t score_columns = 0;
};

void evaluate_from_predictions(const RunConfig& cfg, const EvaluateOptions& opts,
                               std::ostream& out) {
  const fs::path& path = *opts.from_predictions;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrc::missing_path, "cannot open predictions file " + path.string());

  std::optional<std::vector<std::string>> names;
  if (opts.classes) {
    names = load_class_list(*opts.classes);
  } else if (fs::exists(in_output(cfg, files::kClasses))) {
    names = load_class_list(in_output(cfg, files::kClasses));
  }

  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (rows.empty() && width == 0 && fields[0] == "label") continue;  // header
    if (fields.size() < 2) {
      throw DataError(DataErrc::bad_manifest, path.string() + ":" + std::to_string(line_no) +
                                                  ": expected label,prediction[,scores...]");
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw DataError(DataErrc::bad_manifest, path.string() + ":" + std::to_string(line_no) +
                                                  ": " + std::to_string(fields.size()) +
                                                  " fields, earlier rows have " +
                                                  std::to_string(width));
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw DataError(DataErrc::bad_manifest, path.string() + " holds no predictions");
  const std::size_t score_columns = width - 2;

  if (!names) {
    bool numeric = true;
    std::size_t max_index = 0;
    std::vector<std::string> distinct;
    for (const auto& r : rows) {
      for (int f = 0; f < 2; ++f) {
        const auto idx = as_index(r[f]);
        numeric = numeric && idx.has_value();
        if (idx) max_index = std::max(max_index, *idx);
        distinct.push_back(r[f]);
      }
    }
    std::vector<std::string> generated;
    if (numeric) {
      const std::size_t k = std::max({max_index + 1, score_columns, std::size_t{2}});
      for (std::size_t i = 0; i < k; ++i) generated.push_back(std::to_string(i));
    } else {
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      generated = std::move(distinct);
    }
    names = std::move(generated);
  }

  const std::size_t k = names->size();
  auto resolve = [&](const std::string& token, std::size_t row) {
    const auto it = std::find(names->begin(), names->end(), token);
    if (it != names->end()) return static_cast<std::size_t>(it - names->begin());
    if (const auto idx = as_index(token); idx && *idx < k) return *idx;
    throw DataError(DataErrc::bad_manifest, path.string() + ": row " + std::to_string(row + 1) +
                                                ": unknown class '" + token + "'");
  };

  PredictionRows p;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    p.labels.push_back(resolve(rows[r][0], r));
    p.predictions.push_back(resolve(rows[r][1], r));
  }
  const ConfusionMatrix cm = confusion(p.labels, p.predictions, *names);

  if (score_columns == 0) {
    finish_report(cm, nullptr, cfg, out);
    return;
  }
  if (score_columns != k) {
    throw DataError(DataErrc::bad_manifest, path.string() + ": " + std::to_string(score_columns) +
                                                " score columns for " + std::to_string(k) +
                                                " classes");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      try {
        std::size_t used = 0;
        p.scores.push_back(std::stod(rows[r][2 + c], &used));
        if (used != rows[r][2 + c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError(DataErrc::bad_manifest, path.string() + ": row " + std::to_string(r + 1) +
                                                    ": bad score '" + rows[r][2 + c] + "'");
      }
    }
  }
  const ScoreMatrix scores(std::move(p.scores), p.labels, k);
  finish_report(cm, &scores, cfg, out);
}

}  // namespace

void cmd_ingest(const RunConfig& cfg, std::ostream& out) {
  const fs::path root = dataset_root(cfg);
  if (!fs::exists(root)) throw ConfigError("dataset root does not exist: " + root.string());
  const DatasetIndex index = scan_dataset(root);
  const SplitManifest manifest = split(index, cfg.split_fraction, cfg.seed, cfg.stratified);
  fs::create_directories(cfg.output_dir);
  save_manifest(manifest, in_output(cfg, files::kSplit));
  save_class_list(index.class_names, in_output(cfg, files::kClasses));
  out << index.class_names.size() << " classes, " << index.samples.size() << " samples, "
      << manifest.train.size() << " train / " << manifest.validation.size() << " val\n";
}

void cmd_extract(const RunConfig& cfg, std::ostream& out) {
  const fs::path root = dataset_root(cfg);
  const auto names = load_classes(cfg);
  const SplitManifest manifest = load_manifest(in_output(cfg, files::kSplit));
  const Architecture arch = make_architecture(cfg, names.size());
  const WeightStore store = load_weights(cfg.weights_path, arch, HeadPolicy::optional);

  FeatureCache cache;
  for (const auto* part : {&manifest.train, &manifest.validation}) {
    for (const auto& s : *part) {
      if (s.class_index >= names.size()) {
        throw DataError(DataErrc::bad_manifest,
                        "split entry " + s.path.generic_string() + " has class index " +
                            std::to_string(s.class_index) + " but only " +
                            std::to_string(names.size()) + " classes exist");
      }
      cache.records.push_back({s.class_index, part == &manifest.train, s.path});
    }
  }
  const std::size_t n = cache.records.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor x = load_input(cfg, root / cache.records[i].path);
    cache.features.push_back(extract_features(arch, store, x));
    if ((i + 1) % 25 == 0 || i + 1 == n) out << "extracted " << i + 1 << "/" << n << "\n" << std::flush;
  }
  fs::create_directories(cfg.output_dir);
  const fs::path path = in_output(cfg, files::kFeatures);
  save_feature_cache(cache, path);
  out << "wrote " << n << " feature vectors of length " << arch.feature_length() << " to "
      << path.string() << "\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
  const auto names = load_classes(cfg);
  const FeatureCache cache = load_feature_cache(in_output(cfg, files::kFeatures));
  const Architecture arch = make_architecture(cfg, names.size());
  if (cache.feature_length() != arch.feature_length()) {
    throw ShapeError("cached features have length " + std::to_string(cache.feature_length()) +
                     ", the " + cfg.arch + " model at side " + std::to_string(cfg.input_side) +
                     " produces " + std::to_string(arch.feature_length()));
  }
  const FeatureSet train_set = select_split(cache, true);
  const FeatureSet val_set = select_split(cache, false);
  if (train_set.empty()) throw DataError(DataErrc::bad_manifest, "feature cache has no training rows");
  if (val_set.empty()) throw DataError(DataErrc::bad_manifest, "feature cache has no validation rows");

  WeightStore store = load_weights(cfg.weights_path, arch, HeadPolicy::optional);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;

  EpochFeatureSource source;
  if (cfg.augmented_training) {
    const fs::path root = dataset_root(cfg);
    source = [&](int epoch) {
      const std::uint64_t epoch_seed = splitmix64(cfg.seed ^ (static_cast<std::uint64_t>(epoch) << 32));
      std::vector<Tensor> rows;
      for (std::size_t r = 0; r < train_set.rows.size(); ++r) {
        const auto& rec = cache.records[train_set.rows[r]];
        const Tensor resized = resize_bilinear(decode_image(root / rec.path), cfg.input_side);
        Prng rng = Prng::derive(epoch_seed, train_set.rows[r]);
        const Tensor warped = augment(resized, cfg.augment, rng);
        rows.push_back(
            extract_features(arch, store, preprocess(warped, cfg.input_side, cfg.normalization)));
      }
      out << "epoch " << epoch << ": re-extracted " << rows.size() << " augmented samples\n"
          << std::flush;
      return stack_rows(rows);
    };
  }

  const TrainResult result = train(train_set.matrix(), train_set.labels, val_set.matrix(),
                                   val_set.labels, names.size(), tc, source);
  for (const auto& e : result.curve) {
    out << "epoch " << e.epoch << "/" << tc.epochs << "  train_loss " << fixed(e.train_loss, 4)
        << "  train_acc " << fixed(e.train_accuracy, 4) << "  val_loss " << fixed(e.val_loss, 4)
        << "  val_acc " << fixed(e.val_accuracy, 4) << "\n";
  }
  store_head(store, result.model);
  save_weights(store, cfg.weights_path);
  fs::create_directories(cfg.output_dir);
  save_curves_csv(result.curve, in_output(cfg, files::kCurves));
  out << "head stored in " << cfg.weights_path.string() << ", curves in "
      << in_output(cfg, files::kCurves).string() << "\n";
}

void cmd_evaluate(const RunConfig& cfg, const EvaluateOptions& opts, std::ostream& out) {
  fs::create_directories(cfg.output_dir);
  if (opts.from_predictions) {
    evaluate_from_predictions(cfg, opts, out);
    return;
  }
  const auto names = opts.classes ? load_class_list(*opts.classes) : load_classes(cfg);
  const FeatureCache cache = load_feature_cache(in_output(cfg, files::kFeatures));
  const FeatureSet val_set = select_split(cache, false);
  if (val_set.empty()) throw DataError(DataErrc::bad_manifest, "feature cache has no validation rows");

  const WeightStore store = load_weights(cfg.weights_path);
  if (!store.contains("head.weight") || !store.contains("head.bias")) {
    throw FormatError(FormatErrc::missing_tensor,
                      cfg.weights_path.string() + " has no trained head; run `leafvgg train` first",
                      "head.weight");
  }
  const HeadModel head = head_from_store(store);
  if (head.class_count() != names.size()) {
    throw ShapeError("the head predicts " + std::to_string(head.class_count()) + " classes, the class list has " +
                     std::to_string(names.size()));
  }
  if (head.feature_length() != cache.feature_length()) {
    throw ShapeError("the head expects " + std::to_string(head.feature_length()) +
                     " features, the cache holds vectors of " +
                     std::to_string(cache.feature_length()));
  }

  const std::size_t k = names.size();
  std::vector<std::size_t> predictions;
  std::vector<double> scores;
  std::ostringstream csv;
  csv << "label,prediction";
  for (std::size_t c = 0; c < k; ++c) csv << ",score_" << c;
  csv << "\n";
  char buf[32];
  for (std::size_t r = 0; r < val_set.rows.size(); ++r) {
    const Prediction p = predict(head, val_set.vectors[r]);
    predictions.push_back(p.label);
    csv << csv_field(names[val_set.labels[r]]) << ',' << csv_field(names[p.label]);
    for (float v : p.probabilities.data()) {
      scores.push_back(v);
      std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(v));
      csv << buf;
    }
    csv << "\n";
  }
  write_file(in_output(cfg, files::kPredictions), csv.str());
  const ConfusionMatrix cm = confusion(val_set.labels, predictions, names);
  const ScoreMatrix score_matrix(std::move(scores), val_set.labels, k);
  finish_report(cm, &score_matrix, cfg, out);
}

void cmd_predict(const RunConfig& cfg, const fs::path& image, std::size_t top_k, std::ostream& out) {
  if (top_k == 0) throw ConfigError("--top-k must be at least 1");
  const auto names = load_classes(cfg);
  const Architecture arch = make_architecture(cfg, names.size());
  const WeightStore store = load_weights(cfg.weights_path, arch, HeadPolicy::required);
  const Tensor probs = forward(arch, store, load_input(cfg, image));
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  for (std::size_t i = 0; i < std::min(top_k, order.size()); ++i) {
    out << names[order[i]] << ' ' << fixed(probs[order[i]], 6) << "\n";
  }
}

void cmd_flops(const RunConfig& cfg, const FlopsOptions& opts, std::ostream& out) {
  RunConfig sized = cfg;
  if (opts.input_side) sized.input_side = *opts.input_side;
  const Architecture arch = opts.original_head
                                ? build_vgg19_classic(sized.input_side)
                                : make_architecture(sized, default_class_count(cfg));
  const FlopReport report = count_flops(arch, sized.input_side);
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-8s %-16s %16s\n", "layer", "type", "output", "flops");
  out << line;
  for (const auto& l : report.layers) {
    std::snprintf(line, sizeof line, "%-10s %-8s %-16s %16llu\n", l.name.c_str(), to_string(l.type),
                  to_string(l.output_shape).c_str(), static_cast<unsigned long long>(l.macs));
    out << line;
  }
  std::snprintf(line, sizeof line, "total %llu (%.2f GFLOPs, one multiply-add = one FLOP)\n",
                static_cast<unsigned long long>(report.total),
                static_cast<double>(report.total) / 1e9);
  out << line;
}

int cmd_verify_weights(const RunConfig& cfg, const VerifyOptions& opts, std::ostream& out) {
  const WeightStore store = load_weights(cfg.weights_path);
  for (const auto& e : store) {
    out << e.name << "  " << to_string(e.tensor.shape()) << "  crc32 "
        << checksum_hex(tensor_crc32(e.tensor)) << "\n";
  }
  const Tensor* head_bias = store.find("head.bias");
  const std::size_t k = head_bias ? head_bias->size() : default_class_count(cfg);
  const Architecture arch = make_architecture(cfg, k);

  int code = 0;
  try {
    validate_weights(store, arch, HeadPolicy::optional);
  } catch (const FormatError& e) {
    out << "error [" << to_string(e.code()) << "] " << e.what() << "\n";
    code = 4;
  }
  if (opts.manifest) {
    const ExportManifest manifest = load_export_manifest(*opts.manifest);
    const auto issues = compare_with_manifest(store, manifest);
    for (const auto& issue : issues) out << "mismatch: " << issue << "\n";
    if (!issues.empty()) code = 4;
    out << "manifest " << manifest.source << ": " << manifest.tensors.size() << " tensors, "
        << issues.size() << " mismatches\n";
  }
  if (opts.fixture && code == 0) {
    const Fixture fixture = load_fixture(*opts.fixture);
    const double diff = fixture_max_abs_diff(arch, store, fixture);
    char buf[96];
    std::snprintf(buf, sizeof buf, "fixture max abs diff %.3g (tolerance 1e-3)\n", diff);
    out << buf;
    if (!(diff <= 1e-3)) code = 5;
  }
  if (code == 0) {
    std::size_t conv = 0;
    for (const auto& p : arch.parameters()) conv += !p.is_head;
    out << "OK, " << conv << " conv tensors + head " << (head_bias ? "present" : "absent") << "\n";
  }
  return code;
}

void cmd_init_weights(const RunConfig& cfg, const InitWeightsOptions& opts, std::ostream& out) {
  const std::size_t k = opts.class_count.value_or(default_class_count(cfg));
  const Architecture arch = make_architecture(cfg, k);
  const WeightStore store = random_weights(arch, cfg.seed, opts.with_head);
  if (cfg.weights_path.has_parent_path()) fs::create_directories(cfg.weights_path.parent_path());
  save_weights(store, cfg.weights_path);
  out << "wrote " << store.size() << " random tensors to " << cfg.weights_path.string() << "\n";
  if (opts.manifest) {
    const std::string source = "random-he-uniform/" + cfg.arch + "/seed=" + std::to_string(cfg.seed);
    write_file(*opts.manifest, export_manifest_json(describe_weights(store, source)));
    out << "manifest written to " << opts.manifest->string() << "\n";
  }
}

}  // namespace leafvgg::cli
