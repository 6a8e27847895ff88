#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "leafvgg/error.hpp"

namespace fs = std::filesystem;

namespace leafvgg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw ConfigError(key + ": expected " + want + ", got '" + value + "'");
}

template <class Int>
Int parse_int(const std::string& key, const std::string& value) {
  Int out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

std::string show(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string show(bool v) { return v ? "true" : "false"; }

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define LEAFVGG_PATH_KEY(key, field)                                                   \
  Key {                                                                                \
    key, [](RunConfig& c, const std::string&, const std::string& v) { c.field = v; }, \
        [](const RunConfig& c) { return c.field.string(); }                            \
  }
#define LEAFVGG_KEY(key, field, parse)                                                       \
  Key {                                                                                      \
    key, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse; }, \
        [](const RunConfig& c) { return show(c.field); }                                     \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      LEAFVGG_PATH_KEY("data.root", dataset_root),
      LEAFVGG_KEY("data.split_fraction", split_fraction, parse_double(k, v)),
      LEAFVGG_KEY("data.stratified", stratified, parse_bool(k, v)),
      Key{"data.normalization",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "paper_1_255") {
              c.normalization = Normalization::paper_1_255;
            } else if (v == "imagenet") {
              c.normalization = Normalization::imagenet;
            } else {
              bad_value(k, v, "paper_1_255 or imagenet");
            }
          },
          [](const RunConfig& c) {
            return std::string(c.normalization == Normalization::imagenet ? "imagenet"
                                                                          : "paper_1_255");
          }},
      Key{"model.arch",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v != "vgg19" && v != "tiny") bad_value(k, v, "vgg19 or tiny");
            c.arch = v;
          },
          [](const RunConfig& c) { return c.arch; }},
      Key{"model.input_side",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.input_side = parse_int<std::size_t>(k, v);
          },
          [](const RunConfig& c) { return std::to_string(c.input_side); }},
      LEAFVGG_PATH_KEY("model.weights", weights_path),
      LEAFVGG_KEY("augment.rotation_degrees", augment.rotation_degrees, parse_double(k, v)),
      LEAFVGG_KEY("augment.zoom_low", augment.zoom_low, parse_double(k, v)),
      LEAFVGG_KEY("augment.zoom_high", augment.zoom_high, parse_double(k, v)),
      LEAFVGG_KEY("augment.h_flip", augment.h_flip, parse_bool(k, v)),
      LEAFVGG_KEY("augment.v_flip", augment.v_flip, parse_bool(k, v)),
      LEAFVGG_KEY("augment.shear_degrees", augment.shear_degrees, parse_double(k, v)),
      LEAFVGG_KEY("augment.shift_fraction", augment.shift_fraction, parse_double(k, v)),
      Key{"train.epochs",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.train.epochs = parse_int<int>(k, v);
          },
          [](const RunConfig& c) { return std::to_string(c.train.epochs); }},
      Key{"train.batch_size",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.train.batch_size = parse_int<int>(k, v);
          },
          [](const RunConfig& c) { return std::to_string(c.train.batch_size); }},
      LEAFVGG_KEY("train.learning_rate", train.learning_rate, parse_double(k, v)),
      LEAFVGG_KEY("train.momentum", train.momentum, parse_double(k, v)),
      LEAFVGG_KEY("train.shuffle", train.shuffle_each_epoch, parse_bool(k, v)),
      LEAFVGG_KEY("train.augmented", augmented_training, parse_bool(k, v)),
      Key{"run.seed",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.seed = parse_int<std::uint64_t>(k, v);
          },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      LEAFVGG_KEY("run.deterministic", deterministic, parse_bool(k, v)),
      Key{"run.threads",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.threads = parse_int<int>(k, v);
          },
          [](const RunConfig& c) { return std::to_string(c.threads); }},
      LEAFVGG_PATH_KEY("run.output_dir", output_dir),
  };
  return table;
}

#undef LEAFVGG_KEY
#undef LEAFVGG_PATH_KEY

}  // namespace

void RunConfig::validate() const {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw ConfigError("data.split_fraction must lie strictly between 0 and 1");
  }
  if (output_dir.empty()) throw ConfigError("run.output_dir must not be empty");
  if (weights_path.empty()) throw ConfigError("model.weights must not be empty");
  if (threads < 0) throw ConfigError("run.threads must be >= 0");
  if (input_side == 0) throw ConfigError("model.input_side must be positive");
  augment.validate();
  train.validate();
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = keys();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const Key& k) { return key == k.name; });
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->set(cfg, key, value);
}

void apply_assignment(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("expected key=value, got '" + assignment + "'");
  }
  apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void apply_config_stream(RunConfig& cfg, std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_assignment(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_config_stream(cfg, in, path.string());
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& k : keys()) out << k.name << '=' << k.get(cfg) << '\n';
  return out.str();
}

Architecture make_architecture(const RunConfig& cfg, std::size_t class_count) {
  if (cfg.arch == "tiny") return build_tiny(class_count, cfg.input_side);
  return build_vgg19(class_count, cfg.input_side);
}

}  // namespace leafvgg::cli
