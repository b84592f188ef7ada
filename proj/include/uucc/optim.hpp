#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "uucc/model.hpp"

namespace uucc {

struct SgdMomentumConfig {
  double lr = 1e-3;
  double momentum = 0.9;
  double weight_decay = 0.0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

using OptimizerConfig = std::variant<SgdMomentumConfig, AdamConfig>;

std::string describe(const OptimizerConfig& config);

/// Where a step happens, for fault diagnostics.
struct StepContext {
  std::size_t epoch = 0;
  std::size_t batch = 0;
};

/// Slot buffers for one model. Weight decay is classic L2: weight_decay * param is
/// added to the gradient before the update.
class Optimizer {
 public:
  /// Throws ConfigError for out-of-range hyperparameters.
  Optimizer(const OptimizerConfig& config, const Model& model);

  /// Applies one update from the model's gradients, then zeroes them. Without a
  /// fresh backward pass since the last step this is a no-op. Throws TrainingFault
  /// on a non-finite gradient or parameter.
  void step(Model& model, StepContext context = {});

  const OptimizerConfig& config() const noexcept { return config_; }
  std::uint64_t step_count() const noexcept { return steps_; }
  /// Velocity (sgd) or first moment (adam), one vector per parameter block.
  const std::vector<std::vector<double>>& first_slots() const noexcept { return first_; }
  /// Second moment (adam only; empty for sgd).
  const std::vector<std::vector<double>>& second_slots() const noexcept { return second_; }

 private:
  OptimizerConfig config_;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
  std::uint64_t steps_ = 0;
};

}  // namespace uucc
