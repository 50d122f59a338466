#include "fairgen/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "fairgen/text_io.hpp"

namespace fairgen {

namespace fs = std::filesystem;

namespace {

const char* kKnownKeys[] = {
    "data.schema",    "data.file",      "data.valid",     "out",
    "seeds",          "n_per_cell",     "structure",      "synth.p",
    "synth.d",        "synth.noise",    "synth.axis_scale", "synth.label_sep",
    "synth.cell_max", "synth.cell_min", "synth.flip_min", "synth.flip_max",
    "synth.seed",     "gen.iterations", "gen.batch",      "gen.lr",
    "gen.estimator",  "gen.bandwidth",  "gen.form.positive", "gen.form.negative",
    "clf.epochs",     "clf.batch",      "clf.lr",         "clf.patience",
    "bootstrap.resamples", "bootstrap.k", "fpr.mode",     "alpha.grid",
    "eval.n",         "generators",     "model",
};

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i)
    grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
  KeyValueFile kv = KeyValueFile::read(path);
  for (const auto& [key, value] : kv.entries()) {
    bool known = false;
    for (const char* k : kKnownKeys)
      known = known || key == k;
    if (!known)
      throw std::runtime_error(path.string() + ": unknown key '" + key + "'");
  }

  PipelineConfig cfg;
  cfg.schema_path = kv.get_or("data.schema", "");
  cfg.data_path = kv.get_or("data.file", "");
  cfg.valid_path = kv.get_or("data.valid", "");
  cfg.use_synth = cfg.data_path.empty();
  if (!cfg.use_synth && cfg.schema_path.empty())
    throw std::runtime_error(path.string() + ": data.file needs data.schema");
  cfg.out_dir = kv.get_or("out", "out");

  if (kv.has("seeds")) {
    cfg.seeds.clear();
    for (const std::string& tok : split(kv.get("seeds"), ','))
      cfg.seeds.push_back(static_cast<std::uint64_t>(parse_int(tok, "seed")));
    if (cfg.seeds.empty())
      throw std::runtime_error(path.string() + ": seeds must be nonempty");
  }
  if (kv.has("n_per_cell"))
    for (const std::string& tok : split(kv.get("n_per_cell"), ','))
      cfg.n_per_cell.push_back(static_cast<int>(parse_int(tok, "n_per_cell")));

  cfg.structure = parse_structure(kv.get_or("structure", "hierarchical"));
  cfg.form_positive = parse_gen_form(kv.get_or("gen.form.positive", "lambda"));
  cfg.form_negative = parse_gen_form(kv.get_or("gen.form.negative", "diag"));

  cfg.synth.p = static_cast<int>(parse_int(kv.get_or("synth.p", "3"), "synth.p"));
  cfg.synth.d = static_cast<int>(parse_int(kv.get_or("synth.d", "16"), "synth.d"));
  cfg.synth.noise = parse_double(kv.get_or("synth.noise", "1"), "synth.noise");
  cfg.synth.axis_scale =
      parse_double(kv.get_or("synth.axis_scale", "2"), "synth.axis_scale");
  cfg.synth.label_sep =
      parse_double(kv.get_or("synth.label_sep", "3"), "synth.label_sep");
  cfg.synth.cell_max =
      static_cast<int>(parse_int(kv.get_or("synth.cell_max", "300"), "synth.cell_max"));
  cfg.synth.cell_min =
      static_cast<int>(parse_int(kv.get_or("synth.cell_min", "30"), "synth.cell_min"));
  cfg.synth.flip_min = parse_double(kv.get_or("synth.flip_min", "0.05"), "synth.flip_min");
  cfg.synth.flip_max = parse_double(kv.get_or("synth.flip_max", "0.3"), "synth.flip_max");
  cfg.synth.seed =
      static_cast<std::uint64_t>(parse_int(kv.get_or("synth.seed", "7"), "synth.seed"));

  cfg.gen.iterations =
      static_cast<int>(parse_int(kv.get_or("gen.iterations", "500"), "gen.iterations"));
  cfg.gen.batch = static_cast<int>(parse_int(kv.get_or("gen.batch", "64"), "gen.batch"));
  cfg.gen.learning_rate = parse_double(kv.get_or("gen.lr", "0.001"), "gen.lr");
  std::string estimator = kv.get_or("gen.estimator", "unbiased");
  if (estimator == "unbiased")
    cfg.gen.mmd.estimator = MmdEstimator::UnbiasedCorrected;
  else if (estimator == "literal")
    cfg.gen.mmd.estimator = MmdEstimator::LiteralPaper;
  else
    throw std::runtime_error(path.string() + ": gen.estimator must be unbiased or literal");
  std::string bandwidth = kv.get_or("gen.bandwidth", "median");
  if (bandwidth == "median") {
    cfg.gen.median_bandwidth = true;
  } else {
    cfg.gen.median_bandwidth = false;
    cfg.gen.mmd.sigma = parse_double(bandwidth, "gen.bandwidth");
    if (!(cfg.gen.mmd.sigma > 0.0))
      throw std::runtime_error(path.string() + ": gen.bandwidth must be positive");
  }

  cfg.clf.epochs = static_cast<int>(parse_int(kv.get_or("clf.epochs", "50"), "clf.epochs"));
  cfg.clf.batch = static_cast<int>(parse_int(kv.get_or("clf.batch", "64"), "clf.batch"));
  cfg.clf.adam.step = parse_double(kv.get_or("clf.lr", "0.001"), "clf.lr");
  cfg.clf.patience =
      static_cast<int>(parse_int(kv.get_or("clf.patience", "10"), "clf.patience"));

  cfg.bootstrap.n_resamples = static_cast<int>(
      parse_int(kv.get_or("bootstrap.resamples", "1000"), "bootstrap.resamples"));
  cfg.bootstrap.smoothing_k =
      parse_double(kv.get_or("bootstrap.k", "0.03"), "bootstrap.k");
  cfg.bootstrap.fpr_mode = parse_fpr_mode(kv.get_or("fpr.mode", "negative"));

  if (kv.has("alpha.grid")) {
    for (const std::string& tok : split(kv.get("alpha.grid"), ','))
      cfg.alpha_grid.push_back(parse_double(tok, "alpha"));
  } else {
    cfg.alpha_grid = default_alpha_grid();
  }
  if (std::find(cfg.alpha_grid.begin(), cfg.alpha_grid.end(), 0.5) ==
      cfg.alpha_grid.end()) {
    cfg.alpha_grid.push_back(0.5);
    std::sort(cfg.alpha_grid.begin(), cfg.alpha_grid.end());
  }

  cfg.eval_n = static_cast<std::size_t>(parse_int(kv.get_or("eval.n", "1000"), "eval.n"));
  cfg.generators_path = kv.get_or("generators", "");
  cfg.model_path = kv.get_or("model", "");
  return cfg;
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::string s;
  auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  if (!cfg.use_synth) {
    kv("data.schema", cfg.schema_path);
    kv("data.file", cfg.data_path);
  } else {
    kv("synth.p", std::to_string(cfg.synth.p));
    kv("synth.d", std::to_string(cfg.synth.d));
    kv("synth.noise", format_g9(cfg.synth.noise));
    kv("synth.axis_scale", format_g9(cfg.synth.axis_scale));
    kv("synth.label_sep", format_g9(cfg.synth.label_sep));
    kv("synth.cell_max", std::to_string(cfg.synth.cell_max));
    kv("synth.cell_min", std::to_string(cfg.synth.cell_min));
    kv("synth.flip_min", format_g9(cfg.synth.flip_min));
    kv("synth.flip_max", format_g9(cfg.synth.flip_max));
    kv("synth.seed", std::to_string(cfg.synth.seed));
  }
  kv("out", cfg.out_dir);
  {
    std::string seeds;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
      seeds += (i ? "," : "") + std::to_string(cfg.seeds[i]);
    kv("seeds", seeds);
  }
  {
    std::string n;
    for (std::size_t i = 0; i < cfg.n_per_cell.size(); ++i)
      n += (i ? "," : "") + std::to_string(cfg.n_per_cell[i]);
    kv("n_per_cell", n);
  }
  kv("structure", to_string(cfg.structure));
  kv("gen.form.positive", to_string(cfg.form_positive));
  kv("gen.form.negative", to_string(cfg.form_negative));
  kv("gen.iterations", std::to_string(cfg.gen.iterations));
  kv("gen.batch", std::to_string(cfg.gen.batch));
  kv("gen.lr", format_g9(cfg.gen.learning_rate));
  kv("gen.estimator",
     cfg.gen.mmd.estimator == MmdEstimator::UnbiasedCorrected ? "unbiased" : "literal");
  kv("gen.bandwidth",
     cfg.gen.median_bandwidth ? std::string("median") : format_g9(cfg.gen.mmd.sigma));
  kv("clf.epochs", std::to_string(cfg.clf.epochs));
  kv("clf.batch", std::to_string(cfg.clf.batch));
  kv("clf.lr", format_g9(cfg.clf.adam.step));
  kv("clf.patience", std::to_string(cfg.clf.patience));
  kv("bootstrap.resamples", std::to_string(cfg.bootstrap.n_resamples));
  kv("bootstrap.k", format_g9(cfg.bootstrap.smoothing_k));
  kv("fpr.mode",
     cfg.bootstrap.fpr_mode == FprMode::ConditionOnNegative ? "negative" : "literal");
  {
    std::string grid;
    for (std::size_t i = 0; i < cfg.alpha_grid.size(); ++i)
      grid += (i ? "," : "") + format_g9(cfg.alpha_grid[i]);
    kv("alpha.grid", grid);
  }
  kv("eval.n", std::to_string(cfg.eval_n));
  return s;
}

Dataset load_input_data(const PipelineConfig& cfg) {
  if (cfg.use_synth)
    return synth_dataset(cfg.synth);
  return load_dataset(cfg.data_path, cfg.schema_path);
}

SplitResult split_dataset(const Dataset& ds, Rng& rng) {
  std::vector<Record> train, valid, test;
  for (int code = 0; code < ds.schema().num_groups(); ++code) {
    for (int k = 0; k < ds.num_labels(); ++k) {
      std::vector<std::int64_t> cell = ds.cell_by_code(code, k);
      if (cell.empty())
        continue;
      rng.shuffle(cell);
      std::size_t n = cell.size();
      std::size_t n_test = static_cast<std::size_t>(std::llround(0.2 * n));
      if (n_test >= n)
        n_test = n - 1;
      std::size_t n_rest = n - n_test;
      std::size_t n_valid = static_cast<std::size_t>(std::llround(0.2 * n_rest));
      if (n_valid >= n_rest)
        n_valid = n_rest - 1;
      for (std::size_t i = 0; i < n; ++i) {
        const Record& r = ds.record(cell[i]);
        if (i < n_test)
          test.push_back(r);
        else if (i < n_test + n_valid)
          valid.push_back(r);
        else
          train.push_back(r);
      }
    }
  }
  auto make = [&](std::vector<Record>&& recs) {
    return Dataset(ds.schema(), ds.feature_dim(), ds.num_labels(), std::move(recs));
  };
  return {make(std::move(train)), make(std::move(valid)), make(std::move(test))};
}

MetricStat mean_std(const std::vector<double>& values) {
  MetricStat s;
  if (values.empty())
    return s;
  for (double v : values)
    s.mean += v;
  s.mean /= static_cast<double>(values.size());
  for (double v : values)
    s.stddev += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(values.size()));
  return s;
}

namespace {

double if_at_half(const FairnessReport& report) {
  for (const auto& [a, m] : report.if_alpha)
    if (a == 0.5)
      return m.mean;
  throw std::logic_error("alpha grid lost 0.5");
}

SeedMetrics metrics_from_report(const FairnessReport& report) {
  SeedMetrics m;
  m.ba = report.balanced_accuracy.mean;
  m.df = report.df.mean;
  m.if05 = if_at_half(report);
  m.best_off = report.best_off.mean;
  m.worst_off = report.worst_off.mean;
  return m;
}

struct TrainedModel {
  MlpModel model;
  int n_per_cell = 0;
  double valid_if05 = 0.0;
};

MlpModel fit_classifier(const Dataset& train, const Dataset& valid,
                        const FitConfig& base, std::uint64_t init_seed,
                        std::uint64_t fit_seed) {
  MlpModel model(train.feature_dim(), train.num_labels(), MlpConfig{}, init_seed);
  FitConfig cfg = base;
  cfg.seed = fit_seed;
  fit(model, train, valid, cfg);
  return model;
}

std::vector<std::pair<double, double>> mean_curve(const FairnessReport& report) {
  std::vector<std::pair<double, double>> curve;
  for (const auto& [a, m] : report.if_alpha)
    curve.emplace_back(a, m.mean);
  return curve;
}

SeedResult run_seed(const PipelineConfig& cfg, const Dataset& data,
                    std::uint64_t seed, const fs::path& dir) {
  SeedResult result;
  result.seed = seed;
  std::string stage = "split";
  try {
    Rng split_rng(derive_seed(seed, "split"));
    SplitResult sp = split_dataset(data, split_rng);

    stage = "train-gen";
    GenTrainConfig gen_cfg = cfg.gen;
    gen_cfg.structure = cfg.structure;
    gen_cfg.seed = derive_seed(seed, "gen");
    std::vector<GenForm> forms(data.num_labels());
    for (int k = 0; k < data.num_labels(); ++k)
      forms[k] = k == 0 ? cfg.form_negative : cfg.form_positive;
    TrainResult gen = train_generators(sp.train, gen_cfg, forms);
    save_suite(gen.suite, dir / "generators.txt");
    {
      std::string trace = "iteration\tlabel\tloss\n";
      for (std::size_t k = 0; k < gen.loss_trace.size(); ++k)
        for (std::size_t it = 0; it < gen.loss_trace[k].size(); ++it)
          trace += std::to_string(it) + "\t" + std::to_string(k) + "\t" +
                   format_g9(gen.loss_trace[k][it]) + "\n";
      write_text_file(dir / "gen_loss_trace.tsv", trace);
    }

    stage = "train-clf-unconstrained";
    TrainedModel best_unc{MlpModel(1, 2, MlpConfig{{1}, 0.0}, 0), 0, 0.0};
    bool have_unc = false;
    for (std::size_t ci = 0; ci < cfg.n_per_cell.size(); ++ci) {
      const int n = cfg.n_per_cell[ci];
      Rng es(derive_seed(seed, "equal-unc", ci));
      Dataset tset = equal_sample(sp.train, n, es);
      MlpModel model = fit_classifier(tset, sp.valid, cfg.clf,
                                      derive_seed(seed, "clf-unc-init", ci),
                                      derive_seed(seed, "clf-unc-fit", ci));
      double vif = point_if(sp.valid, model, 0.5, cfg.bootstrap.smoothing_k,
                            cfg.bootstrap.fpr_mode);
      if (!have_unc || vif < best_unc.valid_if05) {
        best_unc = {std::move(model), n, vif};
        have_unc = true;
      }
    }
    best_unc.model.save(dir / "model_unconstrained.txt");
    result.n_unconstrained = best_unc.n_per_cell;

    stage = "augment";
    TrainedModel best_aug{MlpModel(1, 2, MlpConfig{{1}, 0.0}, 0), 0, 0.0};
    bool have_aug = false;
    std::size_t best_aug_generated = 0;
    std::size_t best_aug_original = 0;
    Dataset best_aug_data(data.schema(), data.feature_dim(), data.num_labels(), {});
    for (std::size_t ci = 0; ci < cfg.n_per_cell.size(); ++ci) {
      const int n = cfg.n_per_cell[ci];
      Rng ar(derive_seed(seed, "augment", ci));
      AugmentResult aug = augment(sp.train, gen.suite, n, ar);
      for (const std::string& w : aug.warnings)
        std::cerr << "warning: " << w << "\n";
      Rng es(derive_seed(seed, "equal-aug", ci));
      Dataset tset = equal_sample(aug.data, n, es);
      MlpModel model = fit_classifier(tset, sp.valid, cfg.clf,
                                      derive_seed(seed, "clf-aug-init", ci),
                                      derive_seed(seed, "clf-aug-fit", ci));
      double vif = point_if(sp.valid, model, 0.5, cfg.bootstrap.smoothing_k,
                            cfg.bootstrap.fpr_mode);
      if (!have_aug || vif < best_aug.valid_if05) {
        best_aug = {std::move(model), n, vif};
        best_aug_generated = aug.generated;
        best_aug_original = sp.train.size();
        best_aug_data = std::move(aug.data);
        have_aug = true;
      }
    }
    best_aug.model.save(dir / "model_augmented.txt");
    result.n_augmented = best_aug.n_per_cell;
    result.generated = best_aug_generated;

    stage = "evaluate";
    BootstrapConfig boot_unc = cfg.bootstrap;
    boot_unc.seed = derive_seed(seed, "boot-unc");
    FairnessReport rep_unc =
        bootstrap_estimate(sp.test, best_unc.model, boot_unc, cfg.alpha_grid);
    BootstrapConfig boot_aug = cfg.bootstrap;
    boot_aug.seed = derive_seed(seed, "boot-aug");
    FairnessReport rep_aug =
        bootstrap_estimate(sp.test, best_aug.model, boot_aug, cfg.alpha_grid);

    write_text_file(dir / "fairness_unconstrained.txt",
                    fairness_report_text(rep_unc, data.schema()));
    write_text_file(dir / "fairness_unconstrained.records",
                    fairness_report_records(rep_unc));
    write_text_file(dir / "fairness_augmented.txt",
                    fairness_report_text(rep_aug, data.schema()));
    write_text_file(dir / "fairness_augmented.records",
                    fairness_report_records(rep_aug));
    write_text_file(dir / "ifalpha_unconstrained.tsv", curve_tsv(mean_curve(rep_unc)));
    write_text_file(dir / "ifalpha_augmented.tsv", curve_tsv(mean_curve(rep_aug)));
    result.unconstrained = metrics_from_report(rep_unc);
    result.augmented = metrics_from_report(rep_aug);

    stage = "quality";
    if (best_aug_generated >= 2) {
      std::vector<std::int64_t> real_pos(sp.train.size());
      for (std::size_t i = 0; i < real_pos.size(); ++i)
        real_pos[i] = static_cast<std::int64_t>(i);
      RowMatrix real_pool = gather_features(sp.train, real_pos);

      std::vector<std::int64_t> gen_pos;
      for (std::size_t i = best_aug_original; i < best_aug_data.size(); ++i)
        gen_pos.push_back(static_cast<std::int64_t>(i));
      RowMatrix gen_pool = gather_features(best_aug_data, gen_pos);

      DiversityReport div =
          diversity_report(real_pool, gen_pool, cfg.eval_n, derive_seed(seed, "diversity"));
      result.div_gr = div.mean_gr;
      result.div_rr = div.mean_rr;
      result.div_gg = div.mean_gg;
      std::string div_records = "diversity.gr\t" + format_g9(div.mean_gr) + "\t0\n" +
                                "diversity.rr\t" + format_g9(div.mean_rr) + "\t0\n" +
                                "diversity.gg\t" + format_g9(div.mean_gg) + "\t0\n";
      write_text_file(dir / "diversity.records", div_records);
      write_text_file(dir / "diversity.txt",
                      "G-R " + format_g9(div.mean_gr) + "\nR-R " + format_g9(div.mean_rr) +
                          "\nG-G " + format_g9(div.mean_gg) + "\nn_real " +
                          std::to_string(div.n_real) + "\nn_gen " +
                          std::to_string(div.n_gen) + "\n");

      DistinguishabilityReport dis = distinguishability(real_pool, gen_pool, cfg.eval_n,
                                                        derive_seed(seed, "disting"));
      result.disting_accuracy = dis.accuracy;
      write_text_file(dir / "distinguishability.records",
                      "distinguishability.accuracy\t" + format_g9(dis.accuracy) + "\t0\n");
      write_text_file(dir / "distinguishability.txt",
                      "accuracy " + format_g9(dis.accuracy) + "\ntrain " +
                          std::to_string(dis.train_size) + "\ntest " +
                          std::to_string(dis.test_size) + "\n");
    } else {
      std::cerr << "warning: seed " << seed
                << ": fewer than 2 generated records; quality reports skipped\n";
    }
  } catch (const std::exception& ex) {
    throw std::runtime_error("stage " + stage + " failed (seed " +
                             std::to_string(seed) + "): " + ex.what());
  }
  return result;
}

void write_summary(const PipelineConfig& cfg, const PipelineResult& result,
                   const fs::path& out_dir) {
  auto collect = [&](auto getter) {
    std::vector<double> v;
    for (const SeedResult& r : result.seeds)
      v.push_back(getter(r));
    return mean_std(v);
  };

  std::string records, text;
  auto emit = [&](const std::string& name, const MetricStat& m) {
    records += name + "\t" + format_g9(m.mean) + "\t" + format_g9(m.stddev) + "\n";
    text += name + ": " + format_g9(m.mean) + " +/- " + format_g9(m.stddev) + "\n";
  };
  emit("unconstrained.balanced_accuracy",
       collect([](const SeedResult& r) { return r.unconstrained.ba; }));
  emit("unconstrained.df", collect([](const SeedResult& r) { return r.unconstrained.df; }));
  emit("unconstrained.if_alpha.0.5",
       collect([](const SeedResult& r) { return r.unconstrained.if05; }));
  emit("unconstrained.best_off_fpr",
       collect([](const SeedResult& r) { return r.unconstrained.best_off; }));
  emit("unconstrained.worst_off_fpr",
       collect([](const SeedResult& r) { return r.unconstrained.worst_off; }));
  emit("augmented.balanced_accuracy",
       collect([](const SeedResult& r) { return r.augmented.ba; }));
  emit("augmented.df", collect([](const SeedResult& r) { return r.augmented.df; }));
  emit("augmented.if_alpha.0.5",
       collect([](const SeedResult& r) { return r.augmented.if05; }));
  emit("augmented.best_off_fpr",
       collect([](const SeedResult& r) { return r.augmented.best_off; }));
  emit("augmented.worst_off_fpr",
       collect([](const SeedResult& r) { return r.augmented.worst_off; }));
  emit("diversity.gr", collect([](const SeedResult& r) { return r.div_gr; }));
  emit("diversity.rr", collect([](const SeedResult& r) { return r.div_rr; }));
  emit("diversity.gg", collect([](const SeedResult& r) { return r.div_gg; }));
  emit("distinguishability.accuracy",
       collect([](const SeedResult& r) { return r.disting_accuracy; }));

  text += "seeds:";
  for (const SeedResult& r : result.seeds)
    text += " " + std::to_string(r.seed);
  text += "\nchosen n_per_cell (unconstrained):";
  for (const SeedResult& r : result.seeds)
    text += " " + std::to_string(r.n_unconstrained);
  text += "\nchosen n_per_cell (augmented):";
  for (const SeedResult& r : result.seeds)
    text += " " + std::to_string(r.n_augmented);
  text += "\ngenerated records per seed:";
  for (const SeedResult& r : result.seeds)
    text += " " + std::to_string(r.generated);
  text += "\n";

  write_text_file(out_dir / "summary.records", records);
  write_text_file(out_dir / "summary.txt", text);
  write_text_file(out_dir / "resolved_config.txt", serialize_config(cfg));
}

}  // namespace

PipelineResult run_pipeline_on(const PipelineConfig& cfg, const Dataset& data,
                               const fs::path& out_dir) {
  if (cfg.seeds.empty())
    throw std::invalid_argument("seeds must be nonempty");
  if (cfg.n_per_cell.empty())
    throw std::invalid_argument("config must set n_per_cell");
  for (int n : cfg.n_per_cell)
    if (n < 1)
      throw std::invalid_argument("n_per_cell must be >= 1");
  if (data.num_labels() != 2)
    throw std::invalid_argument("the fairness pipeline needs a binary task");
  if (cfg.structure == Structure::Alternate && !data.schema().all_binary())
    throw std::invalid_argument("alternate structure requires all axes binary");

  fs::create_directories(out_dir);
  PipelineResult result;
  for (std::uint64_t seed : cfg.seeds) {
    fs::path dir = out_dir / ("seed_" + std::to_string(seed));
    fs::create_directories(dir);
    result.seeds.push_back(run_seed(cfg, data, seed, dir));
  }
  write_summary(cfg, result, out_dir);
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  Dataset data = load_input_data(cfg);
  return run_pipeline_on(cfg, data, cfg.out_dir);
}

std::vector<SweepPoint> axes_sweep(const PipelineConfig& cfg) {
  Dataset data = load_input_data(cfg);
  const int p = data.schema().num_axes();
  if (p < 2)
    throw std::invalid_argument("axes sweep needs at least two axes");

  std::vector<SweepPoint> points;
  std::string tsv =
      "q\tgroups\tunc_worst_mean\tunc_worst_std\taug_worst_mean\taug_worst_std"
      "\tunc_if05_mean\tunc_if05_std\taug_if05_mean\taug_if05_std\n";
  for (int q = 1; q <= p; ++q) {
    std::vector<int> keep;
    for (int i = 0; i < q; ++i)
      keep.push_back(i);
    Dataset restricted = restrict_axes(data, keep);
    fs::path dir = fs::path(cfg.out_dir) / ("q" + std::to_string(q));
    PipelineResult run = run_pipeline_on(cfg, restricted, dir);

    SweepPoint pt;
    pt.q = q;
    pt.groups = restricted.schema().num_groups();
    std::vector<double> uw, aw, ui, ai;
    for (const SeedResult& r : run.seeds) {
      uw.push_back(r.unconstrained.worst_off);
      aw.push_back(r.augmented.worst_off);
      ui.push_back(r.unconstrained.if05);
      ai.push_back(r.augmented.if05);
    }
    pt.unc_worst = mean_std(uw);
    pt.aug_worst = mean_std(aw);
    pt.unc_if05 = mean_std(ui);
    pt.aug_if05 = mean_std(ai);
    points.push_back(pt);

    tsv += std::to_string(pt.q) + "\t" + std::to_string(pt.groups) + "\t" +
           format_g9(pt.unc_worst.mean) + "\t" + format_g9(pt.unc_worst.stddev) + "\t" +
           format_g9(pt.aug_worst.mean) + "\t" + format_g9(pt.aug_worst.stddev) + "\t" +
           format_g9(pt.unc_if05.mean) + "\t" + format_g9(pt.unc_if05.stddev) + "\t" +
           format_g9(pt.aug_if05.mean) + "\t" + format_g9(pt.aug_if05.stddev) + "\n";
  }
  write_text_file(fs::path(cfg.out_dir) / "sweep.tsv", tsv);
  return points;
}

CompareResult compare_structures(const PipelineConfig& cfg) {
  Dataset data = load_input_data(cfg);
  if (!data.schema().all_binary())
    throw std::invalid_argument("structure comparison requires all axes binary "
                                "(alternate needs complements)");

  const Structure structures[] = {Structure::Hierarchical, Structure::Alternate,
                                  Structure::Abstract};
  CompareResult result;
  for (Structure s : structures) {
    PipelineConfig sub = cfg;
    sub.structure = s;
    fs::path dir = fs::path(cfg.out_dir) / to_string(s);
    result.runs.push_back(run_pipeline_on(sub, data, dir));
  }

  // The unconstrained model never touches the generator stream, so its rows
  // must agree bitwise across the three runs.
  for (std::size_t run = 1; run < result.runs.size(); ++run)
    for (std::size_t i = 0; i < result.runs[run].seeds.size(); ++i) {
      const SeedMetrics& a = result.runs[0].seeds[i].unconstrained;
      const SeedMetrics& b = result.runs[run].seeds[i].unconstrained;
      if (a.ba != b.ba || a.if05 != b.if05 || a.df != b.df ||
          a.best_off != b.best_off || a.worst_off != b.worst_off)
        throw std::logic_error("unconstrained rows differ across structure runs");
    }

  auto row = [](const std::string& name, const std::vector<double>& ba,
                const std::vector<double>& if05) {
    return CompareRow{name, mean_std(ba), mean_std(if05)};
  };
  {
    std::vector<double> ba, if05;
    for (const SeedResult& r : result.runs[0].seeds) {
      ba.push_back(r.unconstrained.ba);
      if05.push_back(r.unconstrained.if05);
    }
    result.rows.push_back(row("unconstrained", ba, if05));
  }
  const char* names[] = {"augmented", "alternate", "abstract"};
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> ba, if05;
    for (const SeedResult& r : result.runs[i].seeds) {
      ba.push_back(r.augmented.ba);
      if05.push_back(r.augmented.if05);
    }
    result.rows.push_back(row(names[i], ba, if05));
  }

  std::string records, text = "method\tBA\tIF_0.5\n";
  for (const CompareRow& r : result.rows) {
    records += r.method + ".balanced_accuracy\t" + format_g9(r.ba.mean) + "\t" +
               format_g9(r.ba.stddev) + "\n";
    records += r.method + ".if_alpha.0.5\t" + format_g9(r.if05.mean) + "\t" +
               format_g9(r.if05.stddev) + "\n";
    text += r.method + "\t" + format_g9(r.ba.mean) + " +/- " + format_g9(r.ba.stddev) +
            "\t" + format_g9(r.if05.mean) + " +/- " + format_g9(r.if05.stddev) + "\n";
  }
  write_text_file(fs::path(cfg.out_dir) / "compare.records", records);
  write_text_file(fs::path(cfg.out_dir) / "compare.txt", text);
  return result;
}

}  // namespace fairgen
