#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "fairgen/pipeline.hpp"
#include "fairgen/text_io.hpp"

namespace fs = std::filesystem;
using namespace fairgen;

namespace {

struct GlobalArgs {
  std::string config;
  std::string out;
  long long seed = -1;
  bool has_seed = false;
};

PipelineConfig resolve(const GlobalArgs& args) {
  PipelineConfig cfg = load_config(args.config);
  if (!args.out.empty())
    cfg.out_dir = args.out;
  return cfg;
}

std::uint64_t stage_seed(const GlobalArgs& args, const PipelineConfig& cfg) {
  return args.has_seed ? static_cast<std::uint64_t>(args.seed) : cfg.seeds.front();
}

void cmd_synth(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  SynthSpec spec = cfg.synth;
  if (args.has_seed)
    spec.seed = static_cast<std::uint64_t>(args.seed);
  Dataset ds = synth_dataset(spec);
  fs::path out(cfg.out_dir);
  write_dataset(ds, out / "data.tsv", out / "schema.txt");
  write_synth_spec(spec, out / "synth_spec.txt");
  std::cout << "wrote " << ds.size() << " records across "
            << ds.num_nonempty_cells() << " cells to " << out.string() << "\n";
}

void cmd_train_gen(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  Dataset ds = load_input_data(cfg);
  GenTrainConfig gen_cfg = cfg.gen;
  gen_cfg.structure = cfg.structure;
  gen_cfg.seed = derive_seed(stage_seed(args, cfg), "gen");
  std::vector<GenForm> forms(ds.num_labels());
  for (int k = 0; k < ds.num_labels(); ++k)
    forms[k] = k == 0 ? cfg.form_negative : cfg.form_positive;
  TrainResult result = train_generators(ds, gen_cfg, forms);
  fs::path out(cfg.out_dir);
  save_suite(result.suite, out / "generators.txt");
  std::string trace = "iteration\tlabel\tloss\n";
  for (std::size_t k = 0; k < result.loss_trace.size(); ++k)
    for (std::size_t it = 0; it < result.loss_trace[k].size(); ++it)
      trace += std::to_string(it) + "\t" + std::to_string(k) + "\t" +
               format_g9(result.loss_trace[k][it]) + "\n";
  write_text_file(out / "gen_loss_trace.tsv", trace);
  std::cout << "trained " << result.suite.per_label.size() << " generators ("
            << to_string(result.suite.structure) << ") over "
            << gen_cfg.iterations << " iterations\n";
}

void cmd_augment(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  if (cfg.generators_path.empty())
    throw std::runtime_error("augment needs the 'generators' config key");
  if (cfg.n_per_cell.empty())
    throw std::runtime_error("config must set n_per_cell");
  Dataset ds = load_input_data(cfg);
  GeneratorSuite suite = load_suite(cfg.generators_path);
  Rng rng(derive_seed(stage_seed(args, cfg), "augment"));
  AugmentResult aug = augment(ds, suite, cfg.n_per_cell.front(), rng);
  for (const std::string& w : aug.warnings)
    std::cerr << "warning: " << w << "\n";
  fs::path out(cfg.out_dir);
  write_dataset(aug.data, out / "augmented_data.tsv", out / "augmented_schema.txt");
  std::cout << "generated " << aug.generated << " records; total "
            << aug.data.size() << "\n";
}

void cmd_train_clf(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  Dataset ds = load_input_data(cfg);
  std::uint64_t seed = stage_seed(args, cfg);

  Dataset train(ds.schema(), ds.feature_dim(), ds.num_labels(), {});
  Dataset valid = train;
  if (!cfg.valid_path.empty()) {
    train = ds;
    valid = load_dataset(cfg.valid_path, cfg.schema_path);
  } else {
    // Stratified 80/20 train/valid carve.
    Rng rng(derive_seed(seed, "clf-carve"));
    std::vector<Record> train_recs, valid_recs;
    for (int code = 0; code < ds.schema().num_groups(); ++code)
      for (int k = 0; k < ds.num_labels(); ++k) {
        std::vector<std::int64_t> cell = ds.cell_by_code(code, k);
        if (cell.empty())
          continue;
        rng.shuffle(cell);
        std::size_t n_valid = static_cast<std::size_t>(std::llround(0.2 * cell.size()));
        if (n_valid >= cell.size())
          n_valid = cell.size() - 1;
        for (std::size_t i = 0; i < cell.size(); ++i)
          (i < n_valid ? valid_recs : train_recs).push_back(ds.record(cell[i]));
      }
    train = Dataset(ds.schema(), ds.feature_dim(), ds.num_labels(), std::move(train_recs));
    valid = Dataset(ds.schema(), ds.feature_dim(), ds.num_labels(), std::move(valid_recs));
  }

  MlpModel model(train.feature_dim(), train.num_labels(), MlpConfig{},
                 derive_seed(seed, "clf-init"));
  FitConfig fit_cfg = cfg.clf;
  fit_cfg.seed = derive_seed(seed, "clf-fit");
  FitHistory history = fit(model, train, valid, fit_cfg);

  fs::path out(cfg.out_dir);
  model.save(out / "model.txt");
  std::string tsv = "epoch\ttrain_loss\tvalid_balanced_accuracy\n";
  for (std::size_t e = 0; e < history.train_loss.size(); ++e)
    tsv += std::to_string(e) + "\t" + format_g9(history.train_loss[e]) + "\t" +
           format_g9(history.valid_balanced_accuracy[e]) + "\n";
  write_text_file(out / "fit_history.tsv", tsv);
  std::cout << "best epoch " << history.best_epoch << ", validation balanced accuracy "
            << format_g9(history.valid_balanced_accuracy[history.best_epoch]) << "\n";
}

void cmd_evaluate(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  if (cfg.model_path.empty())
    throw std::runtime_error("evaluate needs the 'model' config key");
  Dataset ds = load_input_data(cfg);
  MlpModel model = MlpModel::load(cfg.model_path);
  BootstrapConfig boot = cfg.bootstrap;
  boot.seed = derive_seed(stage_seed(args, cfg), "boot");
  FairnessReport report = bootstrap_estimate(ds, model, boot, cfg.alpha_grid);
  fs::path out(cfg.out_dir);
  write_text_file(out / "fairness.txt", fairness_report_text(report, ds.schema()));
  write_text_file(out / "fairness.records", fairness_report_records(report));
  std::vector<std::pair<double, double>> curve;
  for (const auto& [a, m] : report.if_alpha)
    curve.emplace_back(a, m.mean);
  write_text_file(out / "ifalpha.tsv", curve_tsv(curve));
  std::cout << fairness_report_text(report, ds.schema());
}

void cmd_pipeline(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  if (args.has_seed)
    cfg.seeds = {static_cast<std::uint64_t>(args.seed)};
  PipelineResult result = run_pipeline(cfg);
  std::cout << read_text_file(fs::path(cfg.out_dir) / "summary.txt");
  (void)result;
}

void cmd_sweep(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  if (args.has_seed)
    cfg.seeds = {static_cast<std::uint64_t>(args.seed)};
  axes_sweep(cfg);
  std::cout << read_text_file(fs::path(cfg.out_dir) / "sweep.tsv");
}

void cmd_compare(const GlobalArgs& args) {
  PipelineConfig cfg = resolve(args);
  if (args.has_seed)
    cfg.seeds = {static_cast<std::uint64_t>(args.seed)};
  compare_structures(cfg);
  std::cout << read_text_file(fs::path(cfg.out_dir) / "compare.txt");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intersectional fairness data augmentation: generators, classifiers, "
               "fairness reports"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs args;
  app.add_option("--config", args.config, "key=value configuration file")->required();
  app.add_option("--out", args.out, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", args.seed, "seed override");

  app.add_subcommand("synth", "generate the synthetic benchmark files");
  app.add_subcommand("train-gen", "train the generative functions");
  app.add_subcommand("augment", "augment a dataset with a trained suite");
  app.add_subcommand("train-clf", "train the downstream classifier");
  app.add_subcommand("evaluate", "bootstrap fairness evaluation of a saved model");
  app.add_subcommand("pipeline", "full multi-seed experiment");
  app.add_subcommand("sweep", "pipeline per sensitive-axis count");
  app.add_subcommand("compare", "pipeline per structure (hierarchical/alternate/abstract)");

  CLI11_PARSE(app, argc, argv);
  args.has_seed = seed_opt->count() > 0;

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "synth")
      cmd_synth(args);
    else if (sub == "train-gen")
      cmd_train_gen(args);
    else if (sub == "augment")
      cmd_augment(args);
    else if (sub == "train-clf")
      cmd_train_clf(args);
    else if (sub == "evaluate")
      cmd_evaluate(args);
    else if (sub == "pipeline")
      cmd_pipeline(args);
    else if (sub == "sweep")
      cmd_sweep(args);
    else if (sub == "compare")
      cmd_compare(args);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
