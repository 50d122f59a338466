#include "ref/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace fairgen::ref {

namespace {

double kernel(const double* a, const double* b, std::size_t d, double sigma) {
  double s = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    double diff = a[t] - b[t];
    s += diff * diff;
  }
  return std::exp(-s / (2.0 * sigma * sigma));
}

}  // namespace

double mmd2(const RowMatrix& s, const RowMatrix& s2, const MmdConfig& cfg) {
  const std::size_t m = s.rows;
  const std::size_t d = s.cols;
  double self_a = 0.0, self_b = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) {
        self_a += kernel(s.row(i), s.row(j), d, cfg.sigma);
        self_b += kernel(s2.row(i), s2.row(j), d, cfg.sigma);
      }
      cross += kernel(s.row(i), s2.row(j), d, cfg.sigma);
    }
  const double md = static_cast<double>(m);
  double result = self_a / (md * (md - 1.0)) + self_b / (md * (md - 1.0));
  if (cfg.estimator == MmdEstimator::LiteralPaper)
    result += cross / (md * md);
  else
    result -= 2.0 * cross / (md * md);
  return result;
}

RowMatrix mmd2_grad(const RowMatrix& s_gen, const RowMatrix& s_other,
                    const MmdConfig& cfg) {
  const std::size_t m = s_gen.rows;
  const std::size_t d = s_gen.cols;
  const double md = static_cast<double>(m);
  const double inv_sigma2 = 1.0 / (cfg.sigma * cfg.sigma);
  const double self_coef = 2.0 / (md * (md - 1.0));
  const double cross_coef =
      cfg.estimator == MmdEstimator::LiteralPaper ? 1.0 / (md * md) : -2.0 / (md * md);
  RowMatrix grad(m, d);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) {
        double k = kernel(s_gen.row(i), s_gen.row(j), d, cfg.sigma);
        for (std::size_t t = 0; t < d; ++t)
          grad.row(i)[t] -=
              self_coef * inv_sigma2 * k * (s_gen.row(i)[t] - s_gen.row(j)[t]);
      }
      double k = kernel(s_gen.row(i), s_other.row(j), d, cfg.sigma);
      for (std::size_t t = 0; t < d; ++t)
        grad.row(i)[t] -=
            cross_coef * inv_sigma2 * k * (s_gen.row(i)[t] - s_other.row(j)[t]);
    }
  }
  return grad;
}

double max_cosine(const RowMatrix& queries, std::size_t q, const RowMatrix& set,
                  std::ptrdiff_t exclude) {
  const std::size_t d = queries.cols;
  const double* a = queries.row(q);
  double na = 0.0;
  for (std::size_t t = 0; t < d; ++t)
    na += a[t] * a[t];
  na = std::sqrt(na);
  if (!(na > 0.0))
    throw std::invalid_argument("zero-norm query vector");
  double best = -2.0;
  for (std::size_t i = 0; i < set.rows; ++i) {
    if (exclude >= 0 && static_cast<std::size_t>(exclude) == i)
      continue;
    const double* b = set.row(i);
    double dot = 0.0, nb = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      dot += a[t] * b[t];
      nb += b[t] * b[t];
    }
    if (!(nb > 0.0))
      throw std::invalid_argument("zero-norm set vector");
    double sim = dot / (na * std::sqrt(nb));
    if (sim > best)
      best = sim;
  }
  return best;
}

}  // namespace fairgen::ref
