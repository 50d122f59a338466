#include "fairgen/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "fairgen/rng.hpp"
#include "fairgen/text_io.hpp"

namespace fairgen {

namespace {

void validate(const SynthSpec& spec) {
  if (spec.p < 1)
    throw std::invalid_argument("synth spec needs p >= 1");
  if (spec.d < 1)
    throw std::invalid_argument("synth spec needs d >= 1");
  if (!(spec.noise > 0.0))
    throw std::invalid_argument("synth noise scale must be positive");
  if (spec.cell_min < 1 || spec.cell_max < spec.cell_min)
    throw std::invalid_argument("synth cell sizes need cell_max >= cell_min >= 1");
  if (spec.flip_min < 0.0 || spec.flip_max > 0.5 || spec.flip_max < spec.flip_min)
    throw std::invalid_argument("synth flip rates need 0 <= flip_min <= flip_max <= 0.5");
}

std::vector<double> unit_vector(int d, Rng& rng) {
  std::vector<double> v(d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (!(norm > 0.0));
  norm = std::sqrt(norm);
  for (double& x : v)
    x /= norm;
  return v;
}

}  // namespace

SynthDirections synth_directions(const SynthSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, "synth-directions"));
  SynthDirections dirs;
  dirs.axis_dir.resize(spec.p);
  for (int i = 0; i < spec.p; ++i) {
    dirs.axis_dir[i].resize(2);
    for (int a = 0; a < 2; ++a) {
      dirs.axis_dir[i][a] = unit_vector(spec.d, rng);
      for (double& x : dirs.axis_dir[i][a])
        x *= spec.axis_scale;
    }
  }
  dirs.label_dir = unit_vector(spec.d, rng);
  return dirs;
}

int synth_depth(const GroupId& g) {
  int depth = 0;
  for (int v : g.values)
    depth += v != 0;
  return depth;
}

int synth_cell_count(const SynthSpec& spec, int depth) {
  const double ratio = static_cast<double>(spec.cell_min) / spec.cell_max;
  const double frac = static_cast<double>(depth) / spec.p;
  return static_cast<int>(std::llround(spec.cell_max * std::pow(ratio, frac)));
}

double synth_flip_rate(const SynthSpec& spec, int depth) {
  const double frac = static_cast<double>(depth) / spec.p;
  return spec.flip_min + (spec.flip_max - spec.flip_min) * frac;
}

std::vector<double> synth_cell_mean(const SynthSpec& spec, const SynthDirections& dirs,
                                    const GroupId& g, int label) {
  std::vector<double> mu(spec.d, 0.0);
  for (int i = 0; i < spec.p; ++i)
    for (int t = 0; t < spec.d; ++t)
      mu[t] += dirs.axis_dir[i][g.values[i]][t];
  if (label == 1)
    for (int t = 0; t < spec.d; ++t)
      mu[t] += spec.label_sep * dirs.label_dir[t];
  return mu;
}

Dataset synth_dataset(const SynthSpec& spec) {
  validate(spec);
  SynthDirections dirs = synth_directions(spec);

  std::vector<Axis> axes;
  for (int i = 0; i < spec.p; ++i)
    axes.push_back({"axis" + std::to_string(i), 2});
  AxisSchema schema(std::move(axes));

  Rng rng(derive_seed(spec.seed, "synth-data"));
  std::vector<Record> records;
  for (int code = 0; code < schema.num_groups(); ++code) {
    GroupId g = schema.group_from_code(code);
    const int depth = synth_depth(g);
    const int count = synth_cell_count(spec, depth);
    const double flip = synth_flip_rate(spec, depth);
    for (int k = 0; k < 2; ++k) {
      std::vector<double> mu = synth_cell_mean(spec, dirs, g, k);
      for (int i = 0; i < count; ++i) {
        Record r;
        r.group = g;
        r.features.resize(spec.d);
        for (int t = 0; t < spec.d; ++t)
          r.features[t] = static_cast<float>(mu[t] + spec.noise * rng.normal());
        r.label = rng.uniform() < flip ? 1 - k : k;
        records.push_back(std::move(r));
      }
    }
  }
  return Dataset(std::move(schema), spec.d, 2, std::move(records));
}

void write_synth_spec(const SynthSpec& spec, const std::filesystem::path& path) {
  std::string body;
  body += "synth.p = " + std::to_string(spec.p) + "\n";
  body += "synth.d = " + std::to_string(spec.d) + "\n";
  body += "synth.noise = " + format_g9(spec.noise) + "\n";
  body += "synth.axis_scale = " + format_g9(spec.axis_scale) + "\n";
  body += "synth.label_sep = " + format_g9(spec.label_sep) + "\n";
  body += "synth.cell_max = " + std::to_string(spec.cell_max) + "\n";
  body += "synth.cell_min = " + std::to_string(spec.cell_min) + "\n";
  body += "synth.flip_min = " + format_g9(spec.flip_min) + "\n";
  body += "synth.flip_max = " + format_g9(spec.flip_max) + "\n";
  body += "synth.seed = " + std::to_string(spec.seed) + "\n";
  write_text_file(path, body);
}

}  // namespace fairgen
