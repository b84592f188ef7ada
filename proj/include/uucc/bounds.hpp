#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>

#include "uucc/coefficients.hpp"

namespace uucc {

/// Inputs shared by the bias, deviation and estimation-error bounds of the
/// corrected estimator.
///
/// `alpha` and `beta` are the assumed lower bounds on pi_p * R_p+(g) and
/// pi_n * R_n-(g). `c_loss` is the loss ceiling C_l over the range of model
/// outputs; for the logistic loss it has to be supplied from an assumed output
/// bound, and the results only hold under that ceiling. `l_f` is the Lipschitz
/// constant of the correction function.
struct BoundInputs {
  double alpha = 0.0;
  double beta = 0.0;
  double c_loss = 1.0;
  double l_f = 1.0;
  RiskCoefficients coeffs;
  std::size_t n = 0;
  std::size_t n_prime = 0;
  double delta = 0.05;

  /// Throws ConfigError unless every field is strictly positive and delta < 1.
  void validate() const;
};

struct BiasBound {
  double delta_g = 0.0;
  double bias_upper = 0.0;
};

/// delta_g = exp(-2 alpha^2 / C_l^2 / (a^2/n + c^2/n')) + exp(-2 beta^2 / C_l^2 / (b^2/n' + d^2/n)),
/// bias_upper = (L_f + 1)(a + b + c + d) C_l delta_g.
BiasBound bias_bound(const BoundInputs& in);

/// chi = (a + b)/sqrt(n) + (c + d)/sqrt(n').
double chi_term(const BoundInputs& in);

/// C_l L_f sqrt(ln(2/delta) / 2).
double confidence_constant(const BoundInputs& in);

/// Deviation |R_cc - R| bound holding with probability >= 1 - delta:
/// C_delta * chi + bias_upper.
double deviation_bound(const BoundInputs& in);

/// Estimation-error bound for a depth-m ReLU network whose weight matrices have
/// Frobenius norms at most frob_norms[j] and whose inputs satisfy ||x|| <= c_x:
///   (8 L_f L_l C_x (sqrt(2 m ln 2) + 1) prod M_F(j) + 2 C'_delta) chi + 2 (L_f + 1)(a+b+c+d) C_l Delta
/// with C'_delta = C_l L_f sqrt(ln(1/delta) / 2).
/// Throws ConfigError if frob_norms.size() != depth or a norm is negative.
double estimation_error_bound_mlp(const BoundInputs& in, std::size_t depth, std::span<const double> frob_norms,
                                  double c_x, double l_loss);

/// Writes every intermediate quantity as `name=value` lines.
void write_bound_report(std::ostream& out, const BoundInputs& in);

}  // namespace uucc
