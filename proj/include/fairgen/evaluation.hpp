#pragma once

#include <cstdint>
#include <vector>

#include "fairgen/mmd.hpp"

namespace fairgen {

struct DiversityReport {
  double mean_gr = 0.0;  // generated -> nearest real
  double mean_rr = 0.0;  // real -> nearest other real
  double mean_gg = 0.0;  // generated -> nearest other generated
  std::size_t n_real = 0, n_gen = 0;
};

/// Nearest-neighbor cosine similarity protocol. Draws n points per side
/// (without replacement when the pool is large enough), then averages each
/// point's best similarity. R-R and G-G exclude the query point itself.
DiversityReport diversity_report(const RowMatrix& real_pool, const RowMatrix& gen_pool,
                                 std::size_t n, std::uint64_t seed);

struct DistinguishabilityReport {
  double accuracy = 0.0;
  std::size_t train_size = 0, test_size = 0;
  std::uint64_t seed = 0;
};

/// Real-vs-generated probe: n points per side labeled real=0 / generated=1,
/// shuffled 80/20 train/test split, two-hidden-layer MLP (64, 32); returns
/// test accuracy.
DistinguishabilityReport distinguishability(const RowMatrix& real_pool,
                                            const RowMatrix& gen_pool,
                                            std::size_t n, std::uint64_t seed);

}  // namespace fairgen
