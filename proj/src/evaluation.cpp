#include "fairgen/evaluation.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "fairgen/dataset.hpp"
#include "fairgen/mlp.hpp"
#include "fairgen/rng.hpp"

namespace fairgen {

namespace {

RowMatrix sample_side(const RowMatrix& pool, std::size_t n, Rng& rng) {
  if (pool.rows == 0)
    throw std::invalid_argument("empty sample pool");
  RowMatrix out(n, pool.cols);
  if (pool.rows >= n) {
    std::vector<std::size_t> idx(pool.rows);
    for (std::size_t i = 0; i < idx.size(); ++i)
      idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + rng.uniform_index(idx.size() - i);
      std::swap(idx[i], idx[j]);
      for (std::size_t t = 0; t < pool.cols; ++t)
        out.row(i)[t] = pool.row(idx[i])[t];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = rng.uniform_index(pool.rows);
      for (std::size_t t = 0; t < pool.cols; ++t)
        out.row(i)[t] = pool.row(j)[t];
    }
  }
  return out;
}

std::vector<double> row_norms(const RowMatrix& m, const char* side) {
  std::vector<double> norms(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t t = 0; t < m.cols; ++t)
      s += m.row(i)[t] * m.row(i)[t];
    if (!(s > 0.0))
      throw std::invalid_argument(std::string("zero-norm vector at index ") +
                                  std::to_string(i) + " in " + side +
                                  " sample; cosine similarity undefined");
    norms[i] = std::sqrt(s);
  }
  return norms;
}

// Mean over queries of the best cosine similarity into `set`; exclude_self
// skips the matching index (valid only when queries and set are the same
// matrix).
double mean_nn_cosine(const RowMatrix& queries, const std::vector<double>& qn,
                      const RowMatrix& set, const std::vector<double>& sn,
                      bool exclude_self) {
  const std::int64_t nq = static_cast<std::int64_t>(queries.rows);
  std::vector<double> best(nq);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nq; ++i) {
    const double* a = queries.row(i);
    double hi = -2.0;
    for (std::size_t j = 0; j < set.rows; ++j) {
      if (exclude_self && static_cast<std::size_t>(i) == j)
        continue;
      const double* b = set.row(j);
      double dot = 0.0;
      for (std::size_t t = 0; t < queries.cols; ++t)
        dot += a[t] * b[t];
      double sim = dot / (qn[i] * sn[j]);
      if (sim > hi)
        hi = sim;
    }
    best[i] = hi;
  }
  double sum = 0.0;
  for (double v : best)
    sum += v;
  return sum / static_cast<double>(nq);
}

}  // namespace

DiversityReport diversity_report(const RowMatrix& real_pool, const RowMatrix& gen_pool,
                                 std::size_t n, std::uint64_t seed) {
  if (n < 2)
    throw std::invalid_argument("diversity needs at least 2 points per side");
  if (real_pool.cols != gen_pool.cols)
    throw std::invalid_argument("real and generated dimensions differ");
  Rng rng(seed);
  RowMatrix real = sample_side(real_pool, n, rng);
  RowMatrix gen = sample_side(gen_pool, n, rng);
  std::vector<double> rn = row_norms(real, "real");
  std::vector<double> gn = row_norms(gen, "generated");

  DiversityReport report;
  report.n_real = real.rows;
  report.n_gen = gen.rows;
  report.mean_rr = mean_nn_cosine(real, rn, real, rn, /*exclude_self=*/true);
  report.mean_gr = mean_nn_cosine(gen, gn, real, rn, /*exclude_self=*/false);
  report.mean_gg = mean_nn_cosine(gen, gn, gen, gn, /*exclude_self=*/true);
  return report;
}

DistinguishabilityReport distinguishability(const RowMatrix& real_pool,
                                            const RowMatrix& gen_pool,
                                            std::size_t n, std::uint64_t seed) {
  if (n < 10)
    throw std::invalid_argument("distinguishability needs at least 10 points per side");
  if (real_pool.cols != gen_pool.cols)
    throw std::invalid_argument("real and generated dimensions differ");
  Rng rng(derive_seed(seed, "disting-sample"));
  RowMatrix real = sample_side(real_pool, n, rng);
  RowMatrix gen = sample_side(gen_pool, n, rng);

  const int d = static_cast<int>(real.cols);
  AxisSchema schema({{"origin", 2}});

  // Pool both sides, shuffle, 80/20 split.
  std::vector<std::pair<const RowMatrix*, int>> all;
  for (std::size_t i = 0; i < n; ++i)
    all.emplace_back(&real, static_cast<int>(i));
  for (std::size_t i = 0; i < n; ++i)
    all.emplace_back(&gen, static_cast<int>(i));
  rng.shuffle(all);

  auto to_record = [&](const std::pair<const RowMatrix*, int>& e) {
    Record r;
    r.label = e.first == &gen ? 1 : 0;
    r.group = GroupId{{r.label}};
    r.features.resize(d);
    const double* row = e.first->row(e.second);
    for (int t = 0; t < d; ++t)
      r.features[t] = static_cast<float>(row[t]);
    return r;
  };

  const std::size_t test_count = (2 * n + 4) / 5;  // 20%, rounded up
  std::vector<Record> test_recs, train_recs;
  for (std::size_t i = 0; i < all.size(); ++i)
    (i < test_count ? test_recs : train_recs).push_back(to_record(all[i]));

  auto has_both = [](const std::vector<Record>& recs) {
    bool l0 = false, l1 = false;
    for (const Record& r : recs)
      (r.label == 0 ? l0 : l1) = true;
    return l0 && l1;
  };
  if (!has_both(train_recs) || !has_both(test_recs))
    throw std::invalid_argument("degenerate split: a class is absent from train or test");

  // Carve 20% of the training portion for early stopping.
  std::vector<Record> valid_recs;
  std::vector<Record> fit_recs;
  for (std::size_t i = 0; i < train_recs.size(); ++i)
    (i % 5 == 0 ? valid_recs : fit_recs).push_back(train_recs[i]);
  if (!has_both(valid_recs) || !has_both(fit_recs))
    throw std::invalid_argument("degenerate split: a class is absent from train or test");

  Dataset train(schema, d, 2, std::move(fit_recs));
  Dataset valid(schema, d, 2, std::move(valid_recs));
  Dataset test(schema, d, 2, std::move(test_recs));

  MlpConfig probe_cfg;
  probe_cfg.hidden = {64, 32};
  MlpModel probe(d, 2, probe_cfg, derive_seed(seed, "disting-init"));
  FitConfig fit_cfg;
  fit_cfg.seed = derive_seed(seed, "disting-fit");
  fit(probe, train, valid, fit_cfg);

  std::size_t correct = 0;
  for (const Record& r : test.records())
    correct += probe.predict(r.features.data()) == r.label;

  DistinguishabilityReport report;
  report.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  report.train_size = train.size() + valid.size();
  report.test_size = test.size();
  report.seed = seed;
  return report;
}

}  // namespace fairgen
