#include "fairgen/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairgen/text_io.hpp"

namespace fairgen {

FprMode parse_fpr_mode(const std::string& s) {
  if (s == "negative")
    return FprMode::ConditionOnNegative;
  if (s == "literal")
    return FprMode::LiteralPaper;
  throw std::invalid_argument("unknown fpr mode '" + s +
                              "' (expected negative or literal)");
}

namespace {

struct CellCounts {
  std::int64_t positives = 0, negatives = 0;
  std::int64_t count = 0;  // numerator events for the configured mode
  bool present() const { return positives + negatives > 0; }
};

GroupRates rates_from_counts(const std::vector<CellCounts>& counts,
                             const AxisSchema& schema, double k, FprMode mode) {
  GroupRates rates;
  for (int code = 0; code < static_cast<int>(counts.size()); ++code) {
    const CellCounts& c = counts[code];
    if (!c.present())
      continue;
    const std::int64_t denom_count =
        mode == FprMode::ConditionOnNegative ? c.negatives : c.positives;
    if (denom_count == 0 && k == 0.0)
      throw std::invalid_argument(
          "group " + format_group(schema.group_from_code(code)) +
          " has no examples in the conditioning class and smoothing k = 0");
    GroupRates::Entry e;
    e.group = schema.group_from_code(code);
    e.positives = c.positives;
    e.negatives = c.negatives;
    e.rate = (static_cast<double>(c.count) + k) /
             (static_cast<double>(denom_count) + 2.0 * k);
    rates.entries.push_back(std::move(e));
  }
  return rates;
}

std::vector<CellCounts> count_events(const std::vector<int>& preds,
                                     const std::vector<int>& truth,
                                     const std::vector<int>& group_codes,
                                     const AxisSchema& schema, FprMode mode) {
  if (preds.size() != truth.size() || preds.size() != group_codes.size())
    throw std::invalid_argument("preds, truth and groups must be aligned");
  if (preds.empty())
    throw std::invalid_argument("empty prediction set");
  std::vector<CellCounts> counts(schema.num_groups());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truth[i] != 0 && truth[i] != 1)
      throw std::invalid_argument("FPR needs a binary task (labels 0/1)");
    CellCounts& c = counts.at(group_codes[i]);
    if (truth[i] == 1)
      ++c.positives;
    else
      ++c.negatives;
    if (mode == FprMode::ConditionOnNegative) {
      if (truth[i] == 0 && preds[i] == 1)
        ++c.count;
    } else {
      if (truth[i] == 1 && preds[i] != 0)
        ++c.count;
    }
  }
  return counts;
}

}  // namespace

GroupRates group_fpr(const std::vector<int>& preds, const std::vector<int>& truth,
                     const std::vector<int>& group_codes, const AxisSchema& schema,
                     double smoothing_k, FprMode mode) {
  if (smoothing_k < 0.0)
    throw std::invalid_argument("smoothing k must be >= 0");
  return rates_from_counts(count_events(preds, truth, group_codes, schema, mode),
                           schema, smoothing_k, mode);
}

double differential_fairness(const GroupRates& rates) {
  if (rates.entries.empty())
    throw std::invalid_argument("no groups to compare");
  double lo = rates.entries[0].rate, hi = rates.entries[0].rate;
  for (const auto& e : rates.entries) {
    if (!(e.rate > 0.0))
      throw std::invalid_argument("differential fairness needs all rates > 0 "
                                  "(use smoothing k > 0); group " +
                                  format_group(e.group) + " has rate 0");
    lo = std::min(lo, e.rate);
    hi = std::max(hi, e.rate);
  }
  return std::log(hi / lo);
}

namespace {

double pair_if(double a, double b, double alpha) {
  const double m_min = std::min(a, b);
  const double m_max = std::max(a, b);
  const double d_abs = 1.0 - m_min;
  if (m_min == 1.0)
    return std::numeric_limits<double>::infinity();
  const double d_rel = (1.0 - m_max) / (1.0 - m_min);
  return alpha * d_abs + (1.0 - alpha) * d_rel;
}

}  // namespace

double alpha_if(const GroupRates& rates, double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("alpha must lie in [0, 1]");
  const auto& e = rates.entries;
  if (e.empty())
    throw std::invalid_argument("no groups to compare");
  if (e.size() == 1)
    return pair_if(e[0].rate, e[0].rate, alpha);  // degenerate single-group limit
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      best = std::max(best, pair_if(e[i].rate, e[j].rate, alpha));
  return best;
}

std::vector<std::pair<double, double>> tradeoff_curve(
    const GroupRates& rates, const std::vector<double>& alpha_grid) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(alpha_grid.size());
  for (double a : alpha_grid)
    curve.emplace_back(a, alpha_if(rates, a));
  return curve;
}

FairnessReport bootstrap_estimate(const std::vector<int>& preds,
                                  const std::vector<int>& truth,
                                  const std::vector<int>& group_codes,
                                  const AxisSchema& schema,
                                  const BootstrapConfig& cfg,
                                  const std::vector<double>& alpha_grid) {
  if (preds.empty())
    throw std::invalid_argument("empty test set");
  if (cfg.n_resamples < 1)
    throw std::invalid_argument("n_resamples must be >= 1");
  if (preds.size() != truth.size() || preds.size() != group_codes.size())
    throw std::invalid_argument("preds, truth and groups must be aligned");
  for (int y : truth)
    if (y != 0 && y != 1)
      throw std::invalid_argument("bootstrap FPR estimation needs a binary task");

  const std::size_t n = preds.size();
  const int num_groups = schema.num_groups();
  const int r_total = cfg.n_resamples;

  // Groups present in the full test set, in code order.
  std::vector<bool> present_full(num_groups, false);
  for (int code : group_codes)
    present_full.at(code) = true;
  std::vector<int> full_codes;
  for (int code = 0; code < num_groups; ++code)
    if (present_full[code])
      full_codes.push_back(code);
  std::vector<int> code_to_slot(num_groups, -1);
  for (std::size_t s = 0; s < full_codes.size(); ++s)
    code_to_slot[full_codes[s]] = static_cast<int>(s);
  const std::size_t n_slots = full_codes.size();

  std::vector<double> df_r(r_total), best_r(r_total), worst_r(r_total), ba_r(r_total);
  std::vector<std::vector<double>> if_r(alpha_grid.size(),
                                        std::vector<double>(r_total));
  std::vector<std::vector<double>> fpr_r(n_slots, std::vector<double>(r_total));
  std::vector<std::vector<char>> seen_r(n_slots, std::vector<char>(r_total, 0));

  std::string first_error;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < r_total; ++r) {
    try {
      Rng rng(derive_seed(cfg.seed, "resample", static_cast<std::uint64_t>(r)));
      std::vector<CellCounts> counts(num_groups);
      std::int64_t label_total[2] = {0, 0}, label_correct[2] = {0, 0};
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = rng.uniform_index(n);
        CellCounts& c = counts[group_codes[idx]];
        if (truth[idx] == 1)
          ++c.positives;
        else
          ++c.negatives;
        const bool event = cfg.fpr_mode == FprMode::ConditionOnNegative
                               ? (truth[idx] == 0 && preds[idx] == 1)
                               : (truth[idx] == 1 && preds[idx] != 0);
        c.count += event;
        ++label_total[truth[idx]];
        label_correct[truth[idx]] += preds[idx] == truth[idx];
      }
      GroupRates rates =
          rates_from_counts(counts, schema, cfg.smoothing_k, cfg.fpr_mode);

      double lo = rates.entries[0].rate, hi = rates.entries[0].rate;
      for (const auto& e : rates.entries) {
        lo = std::min(lo, e.rate);
        hi = std::max(hi, e.rate);
        int slot = code_to_slot[schema.group_code(e.group)];
        fpr_r[slot][r] = e.rate;
        seen_r[slot][r] = 1;
      }
      df_r[r] = differential_fairness(rates);
      best_r[r] = lo;
      worst_r[r] = hi;
      for (std::size_t a = 0; a < alpha_grid.size(); ++a)
        if_r[a][r] = alpha_if(rates, alpha_grid[a]);

      double ba = 0.0;
      int labels_present = 0;
      for (int k = 0; k < 2; ++k)
        if (label_total[k] > 0) {
          ba += static_cast<double>(label_correct[k]) /
                static_cast<double>(label_total[k]);
          ++labels_present;
        }
      ba_r[r] = ba / labels_present;
    } catch (const std::exception& ex) {
#pragma omp critical
      if (first_error.empty())
        first_error = ex.what();
    }
  }
  if (!first_error.empty())
    throw std::runtime_error("bootstrap resample failed: " + first_error);

  auto stat = [](const std::vector<double>& v) {
    MetricStat s;
    for (double x : v)
      s.mean += x;
    s.mean /= static_cast<double>(v.size());
    for (double x : v)
      s.stddev += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(s.stddev / static_cast<double>(v.size()));
    return s;
  };

  FairnessReport report;
  report.n_resamples = r_total;
  report.df = stat(df_r);
  report.best_off = stat(best_r);
  report.worst_off = stat(worst_r);
  report.balanced_accuracy = stat(ba_r);
  for (std::size_t a = 0; a < alpha_grid.size(); ++a)
    report.if_alpha.emplace_back(alpha_grid[a], stat(if_r[a]));
  for (std::size_t s = 0; s < n_slots; ++s) {
    report.groups.push_back(schema.group_from_code(full_codes[s]));
    std::vector<double> vals;
    std::int64_t skips = 0;
    for (int r = 0; r < r_total; ++r) {
      if (seen_r[s][r])
        vals.push_back(fpr_r[s][r]);
      else
        ++skips;
    }
    report.group_fpr.push_back(vals.empty() ? MetricStat{} : stat(vals));
    report.group_skips.push_back(skips);
  }
  return report;
}

FairnessReport bootstrap_estimate(const Dataset& test, const MlpModel& model,
                                  const BootstrapConfig& cfg,
                                  const std::vector<double>& alpha_grid) {
  if (test.num_labels() != 2)
    throw std::invalid_argument("bootstrap fairness evaluation needs a binary task");
  std::vector<int> preds, truth, codes;
  preds.reserve(test.size());
  for (const Record& r : test.records()) {
    preds.push_back(model.predict(r.features.data()));
    truth.push_back(r.label);
    codes.push_back(test.schema().group_code(r.group));
  }
  return bootstrap_estimate(preds, truth, codes, test.schema(), cfg, alpha_grid);
}

double point_if(const Dataset& ds, const MlpModel& model, double alpha,
                double smoothing_k, FprMode mode) {
  std::vector<int> preds, truth, codes;
  preds.reserve(ds.size());
  for (const Record& r : ds.records()) {
    preds.push_back(model.predict(r.features.data()));
    truth.push_back(r.label);
    codes.push_back(ds.schema().group_code(r.group));
  }
  return alpha_if(group_fpr(preds, truth, codes, ds.schema(), smoothing_k, mode), alpha);
}

std::string fairness_report_text(const FairnessReport& report, const AxisSchema& schema) {
  (void)schema;
  std::string s;
  auto line = [&s](const std::string& name, const MetricStat& m) {
    s += name + ": " + format_g9(m.mean) + " +/- " + format_g9(m.stddev) + "\n";
  };
  s += "bootstrap resamples: " + std::to_string(report.n_resamples) + "\n";
  line("balanced accuracy", report.balanced_accuracy);
  line("differential fairness", report.df);
  for (const auto& [a, m] : report.if_alpha)
    line("IF_" + format_g9(a), m);
  line("best-off FPR", report.best_off);
  line("worst-off FPR", report.worst_off);
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    line("FPR(" + format_group(report.groups[i]) + ")", report.group_fpr[i]);
    if (report.group_skips[i] > 0)
      s += "  skipped in " + std::to_string(report.group_skips[i]) + " resamples\n";
  }
  return s;
}

std::string fairness_report_records(const FairnessReport& report) {
  std::string s;
  auto rec = [&s](const std::string& name, const MetricStat& m) {
    s += name + "\t" + format_g9(m.mean) + "\t" + format_g9(m.stddev) + "\n";
  };
  rec("balanced_accuracy", report.balanced_accuracy);
  rec("df", report.df);
  for (const auto& [a, m] : report.if_alpha)
    rec("if_alpha." + format_g9(a), m);
  rec("best_off_fpr", report.best_off);
  rec("worst_off_fpr", report.worst_off);
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    rec("fpr." + format_group(report.groups[i]), report.group_fpr[i]);
    s += "skips." + format_group(report.groups[i]) + "\t" +
         std::to_string(report.group_skips[i]) + "\t0\n";
  }
  return s;
}

std::string curve_tsv(const std::vector<std::pair<double, double>>& curve) {
  std::string s;
  for (const auto& [a, v] : curve)
    s += format_g9(a) + "\t" + format_g9(v) + "\n";
  return s;
}

}  // namespace fairgen
