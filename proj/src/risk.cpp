#include "uucc/risk.hpp"

#include <string>

#include "uucc/errors.hpp"

namespace uucc {
namespace {

double mean_loss(std::span<const double> outputs, double sign, LossKind loss) {
  double sum = 0.0;
  for (double g : outputs) sum += loss_eval(loss, sign * g);
  return sum / static_cast<double>(outputs.size());
}

void require_nonempty(std::span<const double> values, const char* what) {
  if (values.empty()) throw InsufficientDataError(std::string(what) + " is empty");
}

}  // namespace

double empirical_pn_risk(std::span<const double> losses_pos, std::span<const double> losses_neg, double pi_p) {
  require_nonempty(losses_pos, "positive loss list");
  require_nonempty(losses_neg, "negative loss list");
  double pos = 0.0;
  for (double v : losses_pos) pos += v;
  double neg = 0.0;
  for (double v : losses_neg) neg += v;
  return pi_p * (pos / static_cast<double>(losses_pos.size())) +
         (1.0 - pi_p) * (neg / static_cast<double>(losses_neg.size()));
}

UURiskParts uu_risk_parts(const RiskCoefficients& coeffs, std::span<const double> outputs,
                          std::span<const double> outputs_prime, LossKind loss) {
  require_nonempty(outputs, "first unlabeled batch");
  require_nonempty(outputs_prime, "second unlabeled batch");
  if (coeffs.swapped) std::swap(outputs, outputs_prime);
  UURiskParts parts;
  parts.A = coeffs.a * mean_loss(outputs, +1.0, loss);
  parts.B = coeffs.b * mean_loss(outputs, -1.0, loss);
  parts.C = coeffs.c * mean_loss(outputs_prime, +1.0, loss);
  parts.D = coeffs.d * mean_loss(outputs_prime, -1.0, loss);
  parts.n = outputs.size();
  parts.n_prime = outputs_prime.size();
  return parts;
}

double uu_unbiased_risk(const UURiskParts& parts) noexcept { return parts.positive_group() + parts.negative_group(); }

CorrectedRisk uu_corrected_risk(const UURiskParts& parts, const CorrectionSpec& spec) {
  CorrectedRisk r;
  r.pos_group = correction_apply(spec, parts.positive_group());
  r.neg_group = correction_apply(spec, parts.negative_group());
  r.value = r.pos_group + r.neg_group;
  return r;
}

double uu_biased_risk(std::span<const double> outputs_larger_prior, std::span<const double> outputs_smaller_prior,
                      LossKind loss) {
  require_nonempty(outputs_larger_prior, "larger-prior batch");
  require_nonempty(outputs_smaller_prior, "smaller-prior batch");
  return 0.5 * mean_loss(outputs_larger_prior, +1.0, loss) + 0.5 * mean_loss(outputs_smaller_prior, -1.0, loss);
}

double ber_zero_one(std::span<const int> labels_true, std::span<const int> predictions) {
  if (labels_true.size() != predictions.size()) throw ShapeError("label and prediction lengths differ");
  std::size_t pos = 0, neg = 0, pos_err = 0, neg_err = 0;
  for (std::size_t i = 0; i < labels_true.size(); ++i) {
    if (labels_true[i] > 0) {
      ++pos;
      pos_err += predictions[i] > 0 ? 0 : 1;
    } else {
      ++neg;
      neg_err += predictions[i] > 0 ? 1 : 0;
    }
  }
  if (pos == 0 || neg == 0) throw UndefinedMetricError("balanced error needs both classes present");
  return 0.5 * (static_cast<double>(pos_err) / static_cast<double>(pos)) +
         0.5 * (static_cast<double>(neg_err) / static_cast<double>(neg));
}

}  // namespace uucc
