#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fairgen/dataset.hpp"

namespace fairgen {

/// Intersectionally biased Gaussian benchmark. Cell means are additive over
/// per-axis direction vectors plus a label offset, so a child cell really is
/// a combination of its parents; group sizes decay geometrically with the
/// number of minority attributes and label flips plant a per-group error
/// floor.
struct SynthSpec {
  int p = 3;  // binary axes
  int d = 16;
  double noise = 1.0;
  double axis_scale = 2.0;   // length of each axis direction vector
  double label_sep = 3.0;    // offset along the label direction for class 1
  int cell_max = 300;        // (group, label) cell size at depth 0
  int cell_min = 30;         // cell size at depth p
  double flip_min = 0.05;    // label flip rate at depth 0
  double flip_max = 0.30;    // label flip rate at depth p
  std::uint64_t seed = 7;
};

struct SynthDirections {
  std::vector<std::vector<std::vector<double>>> axis_dir;  // [axis][value][d]
  std::vector<double> label_dir;                           // unit vector
};

/// Direction vectors are a pure function of the spec seed; exposed so tests
/// can compute analytic cell means.
SynthDirections synth_directions(const SynthSpec& spec);

/// Number of minority attributes in g (its depth in the scarcity gradient).
int synth_depth(const GroupId& g);

int synth_cell_count(const SynthSpec& spec, int depth);
double synth_flip_rate(const SynthSpec& spec, int depth);

std::vector<double> synth_cell_mean(const SynthSpec& spec, const SynthDirections& dirs,
                                    const GroupId& g, int label);

Dataset synth_dataset(const SynthSpec& spec);

void write_synth_spec(const SynthSpec& spec, const std::filesystem::path& path);

}  // namespace fairgen
