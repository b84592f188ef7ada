#pragma once

#include <cstddef>
#include <span>

#include "uucc/coefficients.hpp"
#include "uucc/correction.hpp"
#include "uucc/loss.hpp"

namespace uucc {

/// The four scaled partial risks of the rewritten UU risk:
///   A = a * mean loss(+g) over the first set,  B = b * mean loss(-g) over the first set,
///   C = c * mean loss(+g) over the second set, D = d * mean loss(-g) over the second set.
/// "First set" is the one with the larger prior.
struct UURiskParts {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  std::size_t n = 0;
  std::size_t n_prime = 0;

  /// Counterpart of pi_p * R_p+(g).
  double positive_group() const noexcept { return A - C; }
  /// Counterpart of pi_n * R_n-(g).
  double negative_group() const noexcept { return D - B; }
};

/// pi_p * mean(losses_pos) + (1 - pi_p) * mean(losses_neg).
double empirical_pn_risk(std::span<const double> losses_pos, std::span<const double> losses_neg, double pi_p);

/// Model outputs on the caller's two unlabeled sets, in the caller's order; when
/// `coeffs.swapped` the roles of the two sets are exchanged internally.
/// Throws InsufficientDataError if either batch is empty.
UURiskParts uu_risk_parts(const RiskCoefficients& coeffs, std::span<const double> outputs,
                          std::span<const double> outputs_prime, LossKind loss);

/// (A - C) + (D - B). Can be negative on finite samples.
double uu_unbiased_risk(const UURiskParts& parts) noexcept;

struct CorrectedRisk {
  double value = 0.0;
  double pos_group = 0.0;
  double neg_group = 0.0;
};

/// f(A - C) + f(D - B).
CorrectedRisk uu_corrected_risk(const UURiskParts& parts, const CorrectionSpec& spec);

/// Supervised objective with pi_p = 1/2 on the naively labeled sets: the larger-prior
/// set taken as positive and the other as negative.
double uu_biased_risk(std::span<const double> outputs_larger_prior, std::span<const double> outputs_smaller_prior,
                      LossKind loss);

/// Mean of the per-class zero-one error rates. Labels are +1 / -1.
/// Throws UndefinedMetricError if a class is absent from labels_true.
double ber_zero_one(std::span<const int> labels_true, std::span<const int> predictions);

}  // namespace uucc
