#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairgen/dataset.hpp"
#include "fairgen/evaluation.hpp"
#include "fairgen/fairness.hpp"
#include "fairgen/generator.hpp"
#include "fairgen/synth.hpp"

namespace fairgen {

struct PipelineConfig {
  // Data source: explicit files, or the synthetic benchmark when no data
  // file is configured.
  std::string schema_path, data_path;
  bool use_synth = true;
  SynthSpec synth;

  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds = {10, 20, 30, 40, 50};

  // Candidate per-cell sizes; the pipeline picks per model by validation
  // IF_0.5. Must be set explicitly, there is no default.
  std::vector<int> n_per_cell;

  Structure structure = Structure::Hierarchical;
  GenForm form_positive = GenForm::Lambda;
  GenForm form_negative = GenForm::Diag;

  GenTrainConfig gen;
  FitConfig clf;
  BootstrapConfig bootstrap;
  std::vector<double> alpha_grid;  // always contains 0.5
  std::size_t eval_n = 1000;       // diversity / distinguishability side size

  // Inputs used by the single-stage subcommands.
  std::string generators_path, model_path, valid_path;
};

PipelineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& cfg);

/// Loads the configured data files or generates the synthetic benchmark.
Dataset load_input_data(const PipelineConfig& cfg);

struct SplitResult {
  Dataset train, valid, test;
};

/// Stratified per (group, label) cell: 20% test, then 20% of the remainder
/// as validation.
SplitResult split_dataset(const Dataset& ds, Rng& rng);

struct SeedMetrics {
  double ba = 0, df = 0, if05 = 0, best_off = 0, worst_off = 0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  SeedMetrics unconstrained, augmented;
  double div_gr = 0, div_rr = 0, div_gg = 0;
  double disting_accuracy = 0;
  int n_unconstrained = 0, n_augmented = 0;  // selected n_per_cell
  std::size_t generated = 0;
};

struct PipelineResult {
  std::vector<SeedResult> seeds;
};

PipelineResult run_pipeline(const PipelineConfig& cfg);
PipelineResult run_pipeline_on(const PipelineConfig& cfg, const Dataset& data,
                               const std::filesystem::path& out_dir);

struct SweepPoint {
  int q = 0;
  int groups = 0;
  MetricStat unc_worst, aug_worst, unc_if05, aug_if05;
};

/// Reruns the pipeline on the first q axes for q = 1..p.
std::vector<SweepPoint> axes_sweep(const PipelineConfig& cfg);

struct CompareRow {
  std::string method;
  MetricStat ba, if05;
};

struct CompareResult {
  std::vector<CompareRow> rows;  // Unconstrained + one row per structure
  std::vector<PipelineResult> runs;  // hierarchical, alternate, abstract
};

/// Runs all three structures under identical seeds and configuration.
CompareResult compare_structures(const PipelineConfig& cfg);

MetricStat mean_std(const std::vector<double>& values);

}  // namespace fairgen
