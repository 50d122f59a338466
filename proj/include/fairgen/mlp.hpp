#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fairgen/dataset.hpp"
#include "fairgen/rng.hpp"

namespace fairgen {

struct AdamConfig {
  double step = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam state for one parameter vector.
class AdamState {
 public:
  AdamState(std::size_t n, AdamConfig cfg)
      : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void update(std::vector<double>& params, const std::vector<double>& grad);

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  long long t_ = 0;
};

enum class Mode { Train, Eval };

struct MlpConfig {
  std::vector<int> hidden = {128, 64, 32};
  double dropout = 0.5;
};

/// Fully connected ReLU network with inverted dropout on hidden layers.
/// Weights are uniform fan-in initialized, deterministic per seed.
class MlpModel {
 public:
  MlpModel(int input_dim, int num_classes, MlpConfig cfg, std::uint64_t seed);

  int input_dim() const { return dims_.front(); }
  int num_classes() const { return dims_.back(); }
  const std::vector<int>& dims() const { return dims_; }
  double dropout() const { return cfg_.dropout; }

  /// Logits. Train mode draws one dropout mask per hidden unit from rng;
  /// eval mode is deterministic and mask-free.
  std::vector<double> forward(const float* x, Mode mode, Rng* rng) const;

  /// Forward pass with explicit hidden-unit multipliers (one vector per
  /// hidden layer). All-ones multipliers reproduce eval mode exactly.
  std::vector<double> forward_with_masks(
      const float* x, const std::vector<std::vector<double>>& multipliers) const;

  /// Argmax of eval-mode logits; ties break toward the smallest label.
  int predict(const float* x) const;

  void save(const std::filesystem::path& path) const;
  static MlpModel load(const std::filesystem::path& path);

  // Parameters are deliberately open: fit() updates them in place and tests
  // construct rigged instances.
  std::vector<std::vector<double>> weights;  // [layer], out x in, row-major
  std::vector<std::vector<double>> biases;   // [layer], out

 private:
  MlpModel() = default;
  std::vector<int> dims_;  // input, hidden..., output
  MlpConfig cfg_;
};

struct Gradients {
  std::vector<std::vector<double>> w, b;
  double loss = 0.0;
};

/// Mean cross-entropy over the batch and its gradient. `masks`, when given,
/// supplies per-sample hidden-unit multipliers; nullptr disables dropout
/// (used by finite-difference checks).
Gradients ce_loss_and_grad(
    const MlpModel& model, const std::vector<const float*>& xs,
    const std::vector<int>& ys,
    const std::vector<std::vector<std::vector<double>>>* masks);

struct FitConfig {
  int epochs = 50;
  int batch = 64;
  std::uint64_t seed = 0;
  AdamConfig adam;
  int patience = 10;  // epochs without validation improvement
};

struct FitHistory {
  std::vector<double> train_loss;
  std::vector<double> valid_balanced_accuracy;
  int best_epoch = -1;
};

/// Mini-batch cross-entropy training; keeps the parameters of the best
/// validation-balanced-accuracy epoch.
FitHistory fit(MlpModel& model, const Dataset& train, const Dataset& valid,
               const FitConfig& cfg);

/// Mean per-class recall; every label must be present.
double balanced_accuracy(const MlpModel& model, const Dataset& ds);

}  // namespace fairgen
