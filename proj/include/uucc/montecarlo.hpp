#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "uucc/coefficients.hpp"
#include "uucc/config.hpp"
#include "uucc/correction.hpp"
#include "uucc/data.hpp"
#include "uucc/loss.hpp"
#include "uucc/matrix.hpp"

namespace uucc {

/// A fixed linear scorer g(x) = w.x + b used as the classifier under test.
struct FixedClassifier {
  std::vector<double> weight;
  double bias = 0.0;

  std::vector<double> outputs(const Matrix& inputs) const;
};

/// g(x) = x_1, the Bayes threshold of GaussianSource when pi_p = 1/2.
FixedClassifier bayes_threshold(std::size_t dim);

/// Lambda 0 maps to the hard max, anything below zero to the leaky family.
CorrectionSpec correction_for_lambda(double lambda);

/// Ground truth from labeled draws: half of the samples per class, weighted by pi_p.
struct TrueRisk {
  double risk = 0.0;
  double std_error = 0.0;
  double risk_pos = 0.0;  // R_p+(g)
  double risk_neg = 0.0;  // R_n-(g)
  double alpha = 0.0;     // pi_p * R_p+(g)
  double beta = 0.0;      // pi_n * R_n-(g)
  std::size_t samples = 0;
};

/// Throws ConfigError for fewer than two samples.
TrueRisk labeled_true_risk(const GaussianSource& source, const FixedClassifier& g, double pi_p, LossKind loss,
                           std::size_t samples, std::uint64_t seed);

struct McCorrectedStats {
  double lambda = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  /// mean(R_cc - R_uu) over the same resamples; R_uu is unbiased, so this estimates
  /// E[R_cc] - R(g) with much less noise than mean(R_cc) - R(g).
  double bias = 0.0;
  double bias_std_error = 0.0;
  /// mean(R_cc) - R(g), with R(g) from the labeled ground truth.
  double bias_raw = 0.0;
  double delta_g = 0.0;
  double bias_upper = 0.0;
  /// Resamples where R_cc < 0, R_cc < R_uu, or R_cc != R_uu with both groups >= 0.
  std::size_t violations = 0;
};

struct McSizeStats {
  std::size_t n = 0;
  std::size_t n_prime = 0;
  double mean_uu = 0.0;
  double std_error_uu = 0.0;
  /// (mean_uu - R(g)) / std_error_uu.
  double z_uu = 0.0;
  std::size_t negative_resamples = 0;  // at least one group < 0
  std::size_t negative_risk_resamples = 0;  // R_uu < 0
  std::vector<McCorrectedStats> corrected;  // one per lambda
};

struct McReport {
  RiskCoefficients coeffs;
  TrueRisk truth;
  LossKind loss = LossKind::logistic;
  double c_loss = 1.0;
  std::size_t trials = 0;
  std::vector<McSizeStats> sizes;

  std::size_t total_violations() const noexcept;
};

/// Resamples two unlabeled sets `trials` times for every n = n' in config.mc_sizes,
/// evaluates the unbiased and corrected estimators for the fixed Bayes-threshold
/// classifier, and compares them with the labeled ground truth. Uses the first seed.
/// Throws UsageError unless the source is synthetic.
McReport run_estimator_mc(const ExperimentConfig& config);

/// Key-value block.
void write_mc_report(std::ostream& out, const McReport& report);
/// One row per (size, lambda).
void write_mc_csv(std::ostream& out, const McReport& report);

}  // namespace uucc
