#pragma once

namespace uucc {

struct PriorOptions {
  /// Minimum |theta - theta_prime|; the coefficients scale like 1 / (theta - theta_prime).
  double min_gap = 1e-6;
  /// Admit priors of exactly 0 or 1 (the clean-label reduction theta = 1, theta' = 0).
  bool allow_boundary = false;
};

/// Constants of the risk rewriting
///   R(g) = a R_u+(g) - b R_u-(g) - c R_u'+(g) + d R_u'-(g).
///
/// `theta > theta_prime` always holds after construction. When the caller's
/// priors arrived in the other order `swapped` is set, meaning the caller's
/// second unlabeled set plays the role of the first one.
struct RiskCoefficients {
  double theta = 0.0;
  double theta_prime = 0.0;
  double pi_p = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  bool swapped = false;

  double pi_n() const noexcept { return 1.0 - pi_p; }
  double sum() const noexcept { return a + b + c + d; }

  /// Bypasses validation. Only for tests that need hand-chosen constants.
  static RiskCoefficients from_raw(double a, double b, double c, double d) noexcept {
    RiskCoefficients k;
    k.a = a;
    k.b = b;
    k.c = c;
    k.d = d;
    return k;
  }
};

/// Throws ConfigError for priors outside (0, 1) and DegeneratePriorsError when
/// the two priors are closer than `options.min_gap`.
RiskCoefficients compute_coefficients(double theta, double theta_prime, double pi_p,
                                      const PriorOptions& options = {});

}  // namespace uucc
