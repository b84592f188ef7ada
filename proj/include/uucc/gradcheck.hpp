#pragma once

#include <cstddef>
#include <cstdint>

#include "uucc/coefficients.hpp"
#include "uucc/loss.hpp"
#include "uucc/matrix.hpp"
#include "uucc/model.hpp"
#include "uucc/train.hpp"

namespace uucc {

/// One mini-batch pair plus the coefficients the objective is built from.
struct GradCheckFixture {
  Matrix first;
  Matrix second;
  RiskCoefficients coeffs;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  /// Parameters whose +/- step crossed a ReLU or correction kink.
  std::size_t skipped = 0;
  double l_pos = 0.0;
  double l_neg = 0.0;
};

/// Compares the analytic gradient of the mini-batch objective with central
/// differences over every parameter. Relative error is
/// |analytic - numeric| / max(|analytic|, |numeric|, floor). A parameter is
/// skipped when its perturbation flips the sign of L+ or L- (non-identity
/// corrections) or of any hidden pre-activation.
GradCheckResult grad_check(const Model& model, const MethodSpec& method, LossKind loss,
                           const GradCheckFixture& fixture, double step, double floor = 1e-6);

/// Which side of the correction kink a fixture should land on.
enum class FixtureBranch {
  negative,  // L+ < 0 and L- < 0: the first set scores high, the second low
  positive,  // L+ > 0 and L- > 0: the reverse arrangement
};

/// Draws max(16 * rows, 256) standard-normal candidates, ranks them by model output and deals
/// the top and bottom `rows` to the two sides so that the requested branch holds.
/// The inputs are scaled up (doubling) until it does. Throws ContractViolation if
/// no scale works, e.g. for a constant model.
GradCheckFixture make_branch_fixture(const Model& model, const RiskCoefficients& coeffs, LossKind loss,
                                     std::size_t rows, FixtureBranch branch, std::uint64_t seed);

}  // namespace uucc
