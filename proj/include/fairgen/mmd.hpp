#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace fairgen {

/// Dense row-major sample matrix: one point per row.
struct RowMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  RowMatrix() = default;
  RowMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
};

enum class MmdEstimator {
  /// Standard unbiased estimator (diagonal-free self terms, -2/m^2 cross term).
  UnbiasedCorrected,
  /// The main-text variant with a +1/m^2 cross term and no factor 2; kept for
  /// audit only.
  LiteralPaper,
};

struct MmdConfig {
  double sigma = 1.0;
  MmdEstimator estimator = MmdEstimator::UnbiasedCorrected;
};

/// exp(-|z - z'|^2 / (2 sigma^2)); in (0, 1], equals 1 iff z = z'.
double rbf_kernel(const double* z, const double* z2, std::size_t dim, double sigma);
double rbf_kernel(const std::vector<double>& z, const std::vector<double>& z2,
                  double sigma);

/// Squared MMD between two equal-size samples (m >= 2 each).
double mmd2(const RowMatrix& s, const RowMatrix& s2, const MmdConfig& cfg);

/// d mmd2 / d z_i for every row z_i of s_gen, holding s_other fixed.
RowMatrix mmd2_grad(const RowMatrix& s_gen, const RowMatrix& s_other,
                    const MmdConfig& cfg);

/// Median-heuristic bandwidth: sigma^2 = median of pairwise squared distances
/// within the concatenation of the given samples. Falls back to 1.0 when all
/// pairwise distances are zero.
double median_heuristic_sigma(std::initializer_list<const RowMatrix*> samples);
double median_heuristic_sigma(const std::vector<const RowMatrix*>& samples);

}  // namespace fairgen
