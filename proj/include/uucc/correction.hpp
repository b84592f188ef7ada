#pragma once

#include <string>

namespace uucc {

/// A consistent correction function f: Lipschitz, non-negative, and the identity
/// on [0, inf). `identity` is the no-correction member used by the unbiased method.
///
/// The generalized leaky ReLU f(x) = x (x >= 0), lambda * x (x < 0) requires
/// lambda <= 0; lambda = 0 is the hard max and lambda = -1 the absolute value.
class CorrectionSpec {
 public:
  enum class Kind { identity, leaky, hard_max };

  static CorrectionSpec identity() noexcept { return CorrectionSpec(Kind::identity, 1.0); }
  static CorrectionSpec hard_max() noexcept { return CorrectionSpec(Kind::hard_max, 0.0); }
  /// Throws ConfigError when slope > 0 or is not finite.
  static CorrectionSpec leaky(double slope);

  Kind kind() const noexcept { return kind_; }
  /// Slope of the negative branch (1 for identity, 0 for hard_max).
  double slope() const noexcept { return slope_; }
  double lipschitz() const noexcept;
  bool is_identity() const noexcept { return kind_ == Kind::identity; }

  std::string describe() const;

  friend bool operator==(const CorrectionSpec&, const CorrectionSpec&) = default;

 private:
  CorrectionSpec(Kind kind, double slope) noexcept : kind_(kind), slope_(slope) {}

  Kind kind_;
  double slope_;
};

double correction_apply(const CorrectionSpec& spec, double x);

/// Chain-rule multiplier: 1 for x >= 0 (the kink takes the identity branch), slope for x < 0.
double correction_subgrad(const CorrectionSpec& spec, double x);

}  // namespace uucc
