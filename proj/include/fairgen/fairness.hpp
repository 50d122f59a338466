#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairgen/dataset.hpp"
#include "fairgen/mlp.hpp"

namespace fairgen {

enum class FprMode {
  /// FPR proper: P(h(x)=1 | y=0), the default.
  ConditionOnNegative,
  /// Audit mode reproducing the printed measure 1 - P(h(x)=0 | y=1).
  LiteralPaper,
};

FprMode parse_fpr_mode(const std::string& s);

struct GroupRates {
  struct Entry {
    GroupId group;
    double rate = 0.0;
    std::int64_t positives = 0;  // actual positives in the group
    std::int64_t negatives = 0;  // actual negatives in the group
  };
  std::vector<Entry> entries;  // groups present in the data, ascending code order
};

/// Smoothed group-conditional rates: (count + k) / (denom + 2k). With k = 0
/// this is the raw ratio and an empty conditioning class is an error.
GroupRates group_fpr(const std::vector<int>& preds, const std::vector<int>& truth,
                     const std::vector<int>& group_codes, const AxisSchema& schema,
                     double smoothing_k,
                     FprMode mode = FprMode::ConditionOnNegative);

/// max over group pairs of log(rate / rate') == log(max rate / min rate).
double differential_fairness(const GroupRates& rates);

/// max over distinct group pairs of alpha * Dabs + (1 - alpha) * Drel with
/// Dabs = max(1-m, 1-m') and Drel = (1 - max(m, m')) / (1 - min(m, m')).
/// A pair with min rate 1 yields +infinity.
double alpha_if(const GroupRates& rates, double alpha);

std::vector<std::pair<double, double>> tradeoff_curve(
    const GroupRates& rates, const std::vector<double>& alpha_grid);

struct BootstrapConfig {
  int n_resamples = 1000;
  double smoothing_k = 0.03;
  std::uint64_t seed = 0;
  FprMode fpr_mode = FprMode::ConditionOnNegative;
};

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;
};

struct FairnessReport {
  std::vector<GroupId> groups;           // groups present in the full test set
  std::vector<MetricStat> group_fpr;     // over resamples where the group appears
  std::vector<std::int64_t> group_skips; // resamples missing the group
  MetricStat df, best_off, worst_off, balanced_accuracy;
  std::vector<std::pair<double, MetricStat>> if_alpha;
  int n_resamples = 0;
};

/// Bootstrap estimation: n_resamples draws of |test| records with
/// replacement; smoothed rates, DF, IF_alpha, best/worst-off FPR and balanced
/// accuracy per resample; mean and standard deviation across resamples.
/// Resamples run in parallel on derived seeds; aggregation order is fixed.
FairnessReport bootstrap_estimate(const std::vector<int>& preds,
                                  const std::vector<int>& truth,
                                  const std::vector<int>& group_codes,
                                  const AxisSchema& schema,
                                  const BootstrapConfig& cfg,
                                  const std::vector<double>& alpha_grid);

FairnessReport bootstrap_estimate(const Dataset& test, const MlpModel& model,
                                  const BootstrapConfig& cfg,
                                  const std::vector<double>& alpha_grid);

/// Point estimate of IF_alpha on a dataset (used for hyperparameter selection).
double point_if(const Dataset& ds, const MlpModel& model, double alpha,
                double smoothing_k, FprMode mode);

std::string fairness_report_text(const FairnessReport& report, const AxisSchema& schema);
std::string fairness_report_records(const FairnessReport& report);
std::string curve_tsv(const std::vector<std::pair<double, double>>& curve);

}  // namespace fairgen
