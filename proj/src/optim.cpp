#include "uucc/optim.hpp"

#include <cmath>

#include "uucc/errors.hpp"
#include "uucc/report.hpp"

namespace uucc {
namespace {

void check(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("invalid optimizer setting: ") + what);
}

void validate(const SgdMomentumConfig& c) {
  check(std::isfinite(c.lr) && c.lr > 0.0, "lr must be > 0");
  check(c.momentum >= 0.0 && c.momentum < 1.0, "momentum must be in [0, 1)");
  check(std::isfinite(c.weight_decay) && c.weight_decay >= 0.0, "weight_decay must be >= 0");
}

void validate(const AdamConfig& c) {
  check(std::isfinite(c.lr) && c.lr > 0.0, "lr must be > 0");
  check(c.beta1 >= 0.0 && c.beta1 < 1.0, "beta1 must be in [0, 1)");
  check(c.beta2 >= 0.0 && c.beta2 < 1.0, "beta2 must be in [0, 1)");
  check(std::isfinite(c.epsilon) && c.epsilon > 0.0, "epsilon must be > 0");
  check(std::isfinite(c.weight_decay) && c.weight_decay >= 0.0, "weight_decay must be >= 0");
}

}  // namespace

std::string describe(const OptimizerConfig& config) {
  if (const auto* sgd = std::get_if<SgdMomentumConfig>(&config)) {
    return "sgd(lr=" + format_real(sgd->lr) + ", momentum=" + format_real(sgd->momentum) +
           ", weight_decay=" + format_real(sgd->weight_decay) + ")";
  }
  const auto& adam = std::get<AdamConfig>(config);
  return "adam(lr=" + format_real(adam.lr) + ", beta1=" + format_real(adam.beta1) + ", beta2=" +
         format_real(adam.beta2) + ", epsilon=" + format_real(adam.epsilon) +
         ", weight_decay=" + format_real(adam.weight_decay) + ")";
}

Optimizer::Optimizer(const OptimizerConfig& config, const Model& model) : config_(config) {
  std::visit([](const auto& c) { validate(c); }, config_);
  const bool adam = std::holds_alternative<AdamConfig>(config_);
  for (const auto& layer : model.layers()) {
    first_.emplace_back(layer.weight.size(), 0.0);
    first_.emplace_back(layer.bias.size(), 0.0);
    if (adam) {
      second_.emplace_back(layer.weight.size(), 0.0);
      second_.emplace_back(layer.bias.size(), 0.0);
    }
  }
}

void Optimizer::step(Model& model, StepContext context) {
  if (!model.has_fresh_grads()) return;
  auto blocks = model.parameter_blocks();
  if (blocks.size() != first_.size()) throw ContractViolation("optimizer is bound to a different model");

  for (const auto& block : blocks) {
    for (double g : block.grads) {
      if (!std::isfinite(g)) throw TrainingFault("non-finite gradient", context.epoch, context.batch);
    }
  }

  ++steps_;
  if (const auto* sgd = std::get_if<SgdMomentumConfig>(&config_)) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto& velocity = first_[b];
      auto params = blocks[b].values;
      auto grads = blocks[b].grads;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + sgd->weight_decay * params[i];
        velocity[i] = sgd->momentum * velocity[i] + g;
        params[i] -= sgd->lr * velocity[i];
      }
    }
  } else {
    const auto& adam = std::get<AdamConfig>(config_);
    const double t = static_cast<double>(steps_);
    const double bias1 = 1.0 - std::pow(adam.beta1, t);
    const double bias2 = 1.0 - std::pow(adam.beta2, t);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto& m = first_[b];
      auto& v = second_[b];
      auto params = blocks[b].values;
      auto grads = blocks[b].grads;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + adam.weight_decay * params[i];
        m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g;
        v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g * g;
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        params[i] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.epsilon);
      }
    }
  }

  for (const auto& block : blocks) {
    for (double p : block.values) {
      if (!std::isfinite(p)) throw TrainingFault("non-finite parameter after update", context.epoch, context.batch);
    }
  }
  model.zero_grads();
  model.mark_updated();
}

}  // namespace uucc
