#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairgen/dataset.hpp"
#include "fairgen/mlp.hpp"
#include "fairgen/mmd.hpp"

namespace fairgen {

enum class GenForm { Lambda, Diag };

/// Which groups supply the combination inputs for a target group: its own
/// parents, the parents of its axiswise complement, or its grandparent
/// predicates.
enum class Structure { Hierarchical, Alternate, Abstract };

std::string to_string(GenForm form);
std::string to_string(Structure structure);
GenForm parse_gen_form(const std::string& s);
Structure parse_structure(const std::string& s);

/// Parameters of one per-label generative function: a weight per source
/// stream (Lambda) or a weight per feature applied to the source sum (Diag).
struct GeneratorParams {
  int label = 0;
  GenForm form = GenForm::Lambda;
  std::vector<double> weights;
};

struct GenTrainConfig {
  int iterations = 500;
  int batch = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Structure structure = Structure::Hierarchical;
  MmdConfig mmd;
  bool median_bandwidth = true;  // recompute sigma per batch from the real draws
};

/// One trained parameter set per label; parameters are shared across groups.
struct GeneratorSuite {
  Structure structure = Structure::Hierarchical;
  std::uint64_t schema_hash = 0;
  std::vector<GeneratorParams> per_label;
};

struct TrainResult {
  GeneratorSuite suite;
  std::vector<std::vector<double>> loss_trace;  // [label][iteration]
};

/// Number of source streams a generator combines under the given structure.
int num_sources(const AxisSchema& schema, Structure structure);

/// Record positions of every source cell feeding generation for (g, label).
std::vector<std::vector<std::int64_t>> source_cells(const Dataset& ds,
                                                    const GroupId& g, int label,
                                                    Structure structure);

RowMatrix gather_features(const Dataset& ds, const std::vector<std::int64_t>& positions);

/// output[j] = sum_i lambda[i] * batches[i][j].
RowMatrix generate_simple(const std::vector<double>& lambda,
                          const std::vector<RowMatrix>& source_batches);

/// output[j] = diag ⊙ sum_i batches[i][j].
RowMatrix generate_diag(const std::vector<double>& diag,
                        const std::vector<RowMatrix>& source_batches);

RowMatrix generate(const GeneratorParams& params,
                   const std::vector<RowMatrix>& source_batches);

/// MMD^2(gen, target) + sum_i MMD^2(gen, source_i).
double gen_loss(const RowMatrix& s_gen, const RowMatrix& s_target,
                const std::vector<RowMatrix>& source_batches, const MmdConfig& cfg);

double gen_loss_value(const GeneratorParams& params, const RowMatrix& s_target,
                      const std::vector<RowMatrix>& source_batches,
                      const MmdConfig& cfg);

/// Analytic gradient of gen_loss_value with respect to the parameters.
std::vector<double> gen_loss_param_grad(const GeneratorParams& params,
                                        const RowMatrix& s_target,
                                        const std::vector<RowMatrix>& source_batches,
                                        const MmdConfig& cfg);

/// Runs the per-iteration group-sampling / batch-drawing / Adam-update loop
/// and returns the trained suite plus the per-label loss trace.
TrainResult train_generators(const Dataset& ds, const GenTrainConfig& cfg,
                             const std::vector<GenForm>& forms);

struct AugmentResult {
  Dataset data;
  std::size_t generated = 0;
  std::vector<std::string> warnings;
};

/// Tops every nonempty (group, label) cell up to n_per_cell with generated
/// records tagged with the target group; original records are kept.
AugmentResult augment(const Dataset& ds, const GeneratorSuite& suite,
                      int n_per_cell, Rng& rng);

void save_suite(const GeneratorSuite& suite, const std::filesystem::path& path);
GeneratorSuite load_suite(const std::filesystem::path& path);

}  // namespace fairgen
