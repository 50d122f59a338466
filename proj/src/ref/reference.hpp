#pragma once

#include <cstddef>

#include "fairgen/mmd.hpp"

// Plain serial implementations, independent of the OpenMP kernels. Tests use
// them as oracles; bench_kernels compares their runtime against the parallel
// paths.
namespace fairgen::ref {

double mmd2(const RowMatrix& s, const RowMatrix& s2, const MmdConfig& cfg);

RowMatrix mmd2_grad(const RowMatrix& s_gen, const RowMatrix& s_other,
                    const MmdConfig& cfg);

/// Max cosine similarity from query row q of `queries` to any row of `set`,
/// skipping `exclude` when it is a valid row index of `set`.
double max_cosine(const RowMatrix& queries, std::size_t q, const RowMatrix& set,
                  std::ptrdiff_t exclude);

}  // namespace fairgen::ref
