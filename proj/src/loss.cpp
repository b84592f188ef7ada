#include "uucc/loss.hpp"

#include <cmath>
#include <string>

#include "uucc/errors.hpp"

namespace uucc {
namespace {

void require_finite(double margin) {
  if (!std::isfinite(margin)) {
    throw InputDomainError("loss margin must be finite, got " + std::to_string(margin));
  }
}

// 1 / (1 + exp(z)) without overflow.
double logistic_tail(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

double loss_eval(LossKind kind, double margin) {
  require_finite(margin);
  switch (kind) {
    case LossKind::logistic:
      if (margin >= 0.0) return std::log1p(std::exp(-margin));
      return -margin + std::log1p(std::exp(margin));
    case LossKind::sigmoid:
      return logistic_tail(margin);
    case LossKind::zero_one:
      if (margin < 0.0) return 1.0;
      if (margin > 0.0) return 0.0;
      return 0.5;
  }
  throw UnsupportedOperationError("unknown loss kind");
}

double loss_grad(LossKind kind, double margin) {
  require_finite(margin);
  switch (kind) {
    case LossKind::logistic:
      return -logistic_tail(margin);
    case LossKind::sigmoid: {
      const double s = logistic_tail(margin);
      return -s * (1.0 - s);
    }
    case LossKind::zero_one:
      throw UnsupportedOperationError("zero-one loss has no derivative; use it for evaluation only");
  }
  throw UnsupportedOperationError("unknown loss kind");
}

double loss_lipschitz(LossKind kind) {
  switch (kind) {
    case LossKind::logistic:
      return 1.0;
    case LossKind::sigmoid:
      return 0.25;
    case LossKind::zero_one:
      break;
  }
  throw UnsupportedOperationError("zero-one loss is not Lipschitz");
}

bool is_differentiable(LossKind kind) noexcept { return kind != LossKind::zero_one; }

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::logistic:
      return "log";
    case LossKind::sigmoid:
      return "sig";
    case LossKind::zero_one:
      return "01";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "log" || name == "logistic") return LossKind::logistic;
  if (name == "sig" || name == "sigmoid") return LossKind::sigmoid;
  if (name == "01" || name == "zero_one") return LossKind::zero_one;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected log or sig)");
}

}  // namespace uucc
