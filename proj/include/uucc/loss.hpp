#pragma once

#include <string_view>

namespace uucc {

/// Margin losses: every loss is a function of z = y * g(x).
enum class LossKind { logistic, sigmoid, zero_one };

/// ln(1 + exp(-z)) for logistic, 1 / (1 + exp(z)) for sigmoid, and the
/// zero-one loss with value 1/2 at z = 0. Throws InputDomainError on non-finite z.
double loss_eval(LossKind kind, double margin);

/// d loss / d z. Throws UnsupportedOperationError for zero_one.
double loss_grad(LossKind kind, double margin);

/// Lipschitz constant in the margin: 1 for logistic, 1/4 for sigmoid.
double loss_lipschitz(LossKind kind);

bool is_differentiable(LossKind kind) noexcept;

std::string_view to_string(LossKind kind) noexcept;

/// Accepts "log"/"logistic", "sig"/"sigmoid", "01"/"zero_one".
LossKind parse_loss_kind(std::string_view name);

}  // namespace uucc
