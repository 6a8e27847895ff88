#include "app.hpp"

#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "leafvgg/error.hpp"
#include "leafvgg/parallel.hpp"

namespace leafvgg::cli {

namespace {

struct GlobalFlags {
  std::optional<std::string> config;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::optional<int> threads;
  std::optional<std::string> output_dir;
  std::optional<std::string> dataset;
  std::optional<std::string> weights;
};

RunConfig resolve(const GlobalFlags& g) {
  RunConfig cfg;
  if (g.config) apply_config_file(cfg, *g.config);
  for (const auto& s : g.settings) apply_assignment(cfg, s);
  if (g.seed) cfg.seed = *g.seed;
  if (g.deterministic) cfg.deterministic = true;
  if (g.threads) cfg.threads = *g.threads;
  if (g.output_dir) cfg.output_dir = *g.output_dir;
  if (g.dataset) cfg.dataset_root = *g.dataset;
  if (g.weights) cfg.weights_path = *g.weights;
  cfg.validate();
  // Kernels reduce in a fixed order regardless, so determinism holds at any
  // thread count; --threads only trades speed.
  set_thread_count(cfg.threads);
  return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"leafvgg: VGG-19 transfer-learning leaf classifier"};
  app.name("leafvgg");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "key=value config file");
  app.add_option("--set", g.settings, "override one config key, e.g. --set train.epochs=10")
      ->take_all();
  app.add_option("--seed", g.seed, "run seed (run.seed)");
  app.add_flag("--deterministic", g.deterministic, "fixed reduction order everywhere");
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--output-dir", g.output_dir, "directory for manifests, caches and reports");
  app.add_option("--dataset", g.dataset, "dataset root (data.root)");
  app.add_option("--weights", g.weights, "LEFW1 weight file (model.weights)");

  auto* ingest = app.add_subcommand("ingest", "scan the dataset and write the train/val split");
  auto* extract = app.add_subcommand("extract", "cache frozen features for every sample");
  auto* train = app.add_subcommand("train", "train the softmax head on cached features");

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "metrics report on the validation split");
  evaluate->add_option("--from-predictions", eval_opts.from_predictions,
                       "CSV of label,prediction[,scores] rows instead of the model");
  evaluate->add_option("--classes", eval_opts.classes, "class list, one name per line");

  std::string image;
  std::size_t top_k = 5;
  auto* predict = app.add_subcommand("predict", "classify one image");
  predict->add_option("image", image, "image file")->required();
  predict->add_option("--top-k", top_k, "number of classes to list");

  FlopsOptions flops_opts;
  auto* flops = app.add_subcommand("flops", "per-layer multiply-add counts");
  flops->add_option("--input-side", flops_opts.input_side, "square input side");
  flops->add_flag("--original-head", flops_opts.original_head, "use the 4096-4096-1000 dense stack");

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify-weights", "check a weight file");
  verify->add_option("--manifest", verify_opts.manifest, "export manifest JSON to compare against");
  verify->add_option("--fixture", verify_opts.fixture, "reference fixture to run through the model");

  InitWeightsOptions init_opts;
  auto* init = app.add_subcommand("init-weights", "write random conv weights (smoke runs)");
  init->add_option("--classes", init_opts.class_count, "class count of the head");
  init->add_flag("--with-head", init_opts.with_head, "also write a random head");
  init->add_option("--manifest", init_opts.manifest, "also write an export manifest");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "leafvgg: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const RunConfig cfg = resolve(g);
    if (*ingest) cmd_ingest(cfg, out);
    if (*extract) cmd_extract(cfg, out);
    if (*train) cmd_train(cfg, out);
    if (*evaluate) cmd_evaluate(cfg, eval_opts, out);
    if (*predict) cmd_predict(cfg, image, top_k, out);
    if (*flops) cmd_flops(cfg, flops_opts, out);
    if (*verify) return cmd_verify_weights(cfg, verify_opts, out);
    if (*init) cmd_init_weights(cfg, init_opts, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "leafvgg: configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "leafvgg: data error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const FormatError& e) {
    err << "leafvgg: format error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitFormat;
  } catch (const ShapeError& e) {
    err << "leafvgg: shape error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const NumericError& e) {
    err << "leafvgg: numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "leafvgg: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace leafvgg::cli
