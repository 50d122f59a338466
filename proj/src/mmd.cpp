#include "fairgen/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace fairgen {

namespace {

// Row-block size for parallel sums. Partials are accumulated per block and
// reduced in block order, so results are bitwise identical for any thread
// count.
constexpr std::size_t kBlock = 32;

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void check_pair(const RowMatrix& s, const RowMatrix& s2) {
  if (s.cols != s2.cols)
    throw std::invalid_argument("sample dimensions differ");
  if (s.rows != s2.rows)
    throw std::invalid_argument("samples must have equal size, got " +
                                std::to_string(s.rows) + " vs " +
                                std::to_string(s2.rows));
  if (s.rows < 2)
    throw std::invalid_argument("MMD needs at least 2 points per sample");
}

// Sum of k(x_i, x_j) over i != j within one sample.
double self_sum(const RowMatrix& s, double sigma) {
  const std::int64_t m = static_cast<std::int64_t>(s.rows);
  const std::int64_t nblocks = (m + kBlock - 1) / static_cast<std::int64_t>(kBlock);
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * static_cast<std::int64_t>(kBlock);
    const std::int64_t hi = std::min<std::int64_t>(lo + kBlock, m);
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i)
      for (std::int64_t j = 0; j < m; ++j)
        if (j != i)
          acc += rbf_kernel(s.row(i), s.row(j), s.cols, sigma);
    partial[b] = acc;
  }
  double total = 0.0;
  for (double v : partial)
    total += v;
  return total;
}

// Sum of k(x_i, y_j) over all pairs.
double cross_sum(const RowMatrix& s, const RowMatrix& s2, double sigma) {
  const std::int64_t m = static_cast<std::int64_t>(s.rows);
  const std::int64_t m2 = static_cast<std::int64_t>(s2.rows);
  const std::int64_t nblocks = (m + kBlock - 1) / static_cast<std::int64_t>(kBlock);
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * static_cast<std::int64_t>(kBlock);
    const std::int64_t hi = std::min<std::int64_t>(lo + kBlock, m);
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i)
      for (std::int64_t j = 0; j < m2; ++j)
        acc += rbf_kernel(s.row(i), s2.row(j), s.cols, sigma);
    partial[b] = acc;
  }
  double total = 0.0;
  for (double v : partial)
    total += v;
  return total;
}

}  // namespace

double rbf_kernel(const double* z, const double* z2, std::size_t dim, double sigma) {
  return std::exp(-sq_dist(z, z2, dim) / (2.0 * sigma * sigma));
}

double rbf_kernel(const std::vector<double>& z, const std::vector<double>& z2,
                  double sigma) {
  if (z.size() != z2.size())
    throw std::invalid_argument("rbf_kernel: dimensions differ");
  if (!(sigma > 0.0))
    throw std::invalid_argument("rbf_kernel: sigma must be positive");
  for (double v : z)
    if (!std::isfinite(v))
      throw std::invalid_argument("rbf_kernel: non-finite input");
  for (double v : z2)
    if (!std::isfinite(v))
      throw std::invalid_argument("rbf_kernel: non-finite input");
  return rbf_kernel(z.data(), z2.data(), z.size(), sigma);
}

double mmd2(const RowMatrix& s, const RowMatrix& s2, const MmdConfig& cfg) {
  check_pair(s, s2);
  if (!(cfg.sigma > 0.0))
    throw std::invalid_argument("mmd2: sigma must be positive");
  const double m = static_cast<double>(s.rows);
  const double self_norm = 1.0 / (m * (m - 1.0));
  const double a = self_sum(s, cfg.sigma) * self_norm;
  const double b = self_sum(s2, cfg.sigma) * self_norm;
  const double cross = cross_sum(s, s2, cfg.sigma) / (m * m);
  if (cfg.estimator == MmdEstimator::LiteralPaper)
    return a + b + cross;
  return a + b - 2.0 * cross;
}

RowMatrix mmd2_grad(const RowMatrix& s_gen, const RowMatrix& s_other,
                    const MmdConfig& cfg) {
  check_pair(s_gen, s_other);
  if (!(cfg.sigma > 0.0))
    throw std::invalid_argument("mmd2_grad: sigma must be positive");
  const std::int64_t m = static_cast<std::int64_t>(s_gen.rows);
  const std::size_t d = s_gen.cols;
  const double md = static_cast<double>(m);
  const double inv_sigma2 = 1.0 / (cfg.sigma * cfg.sigma);
  const double self_coef = 2.0 / (md * (md - 1.0));
  const double cross_coef =
      cfg.estimator == MmdEstimator::LiteralPaper ? 1.0 / (md * md) : -2.0 / (md * md);

  RowMatrix grad(s_gen.rows, d);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    double* g = grad.row(i);
    const double* zi = s_gen.row(i);
    // d/dz_i of the self term: pairs (i,j) and (j,i) contribute equally.
    for (std::int64_t j = 0; j < m; ++j) {
      if (j == i)
        continue;
      const double* zj = s_gen.row(j);
      double k = rbf_kernel(zi, zj, d, cfg.sigma);
      double c = -self_coef * inv_sigma2 * k;
      for (std::size_t t = 0; t < d; ++t)
        g[t] += c * (zi[t] - zj[t]);
    }
    for (std::int64_t j = 0; j < m; ++j) {
      const double* zj = s_other.row(j);
      double k = rbf_kernel(zi, zj, d, cfg.sigma);
      double c = -cross_coef * inv_sigma2 * k;
      for (std::size_t t = 0; t < d; ++t)
        g[t] += c * (zi[t] - zj[t]);
    }
  }
  return grad;
}

double median_heuristic_sigma(const std::vector<const RowMatrix*>& samples) {
  std::size_t total = 0;
  std::size_t dim = 0;
  for (const RowMatrix* s : samples) {
    total += s->rows;
    if (s->rows > 0)
      dim = s->cols;
  }
  if (total < 2)
    return 1.0;

  std::vector<const double*> points;
  points.reserve(total);
  for (const RowMatrix* s : samples)
    for (std::size_t i = 0; i < s->rows; ++i)
      points.push_back(s->row(i));

  std::vector<double> dists;
  dists.reserve(total * (total - 1) / 2);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j)
      dists.push_back(sq_dist(points[i], points[j], dim));

  std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double med = dists[mid];
  if (!(med > 0.0))
    return 1.0;
  return std::sqrt(med);
}

double median_heuristic_sigma(std::initializer_list<const RowMatrix*> samples) {
  return median_heuristic_sigma(std::vector<const RowMatrix*>(samples));
}

}  // namespace fairgen
