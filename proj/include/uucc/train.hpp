#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uucc/coefficients.hpp"
#include "uucc/correction.hpp"
#include "uucc/data.hpp"
#include "uucc/loss.hpp"
#include "uucc/model.hpp"
#include "uucc/optim.hpp"

namespace uucc {

/// Training objective.
///   uu_biased     - the larger-prior set taken as positives, the other as negatives, pi_p = 1/2
///   uu_unbiased   - the rewritten risk, no correction
///   uu_corrected  - f(L+) + f(L-) for a consistent correction f
///   supervised_pn - reference run on the hidden labels; only through train_supervised_reference()
class MethodSpec {
 public:
  enum class Kind { uu_biased, uu_unbiased, uu_corrected, supervised_pn };

  static MethodSpec biased() noexcept { return MethodSpec(Kind::uu_biased, CorrectionSpec::identity()); }
  static MethodSpec unbiased() noexcept { return MethodSpec(Kind::uu_unbiased, CorrectionSpec::identity()); }
  static MethodSpec corrected(const CorrectionSpec& spec) noexcept { return MethodSpec(Kind::uu_corrected, spec); }
  static MethodSpec supervised() noexcept { return MethodSpec(Kind::supervised_pn, CorrectionSpec::identity()); }

  Kind kind() const noexcept { return kind_; }
  /// Identity for every method but uu_corrected.
  const CorrectionSpec& correction() const noexcept { return correction_; }
  /// File-name friendly: biased, unbiased, corrected_l<lambda>, supervised.
  std::string name() const;

  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;

 private:
  MethodSpec(Kind kind, CorrectionSpec correction) noexcept : kind_(kind), correction_(correction) {}

  Kind kind_;
  CorrectionSpec correction_;
};

/// Mini-batch objective and its derivative with respect to every model output.
struct BatchObjective {
  double l_pos = 0.0;     // L+ = a mean loss(g(X)) - c mean loss(g(X'))
  double l_neg = 0.0;     // L- = d mean loss(-g(X')) - b mean loss(-g(X))
  double unbiased = 0.0;  // L+ + L-
  double value = 0.0;     // the quantity differentiated
  std::vector<double> grad_first;
  std::vector<double> grad_second;
};

/// Outputs are in the caller's set order (x_tr, x_tr_prime). Throws
/// ConfigError for supervised_pn (use supervised_batch_objective) and
/// InsufficientDataError for an empty side.
BatchObjective batch_objective(const RiskCoefficients& coeffs, std::span<const double> out_first,
                               std::span<const double> out_second, const MethodSpec& method, LossKind loss);

/// pi_p mean loss(g) over positives + (1 - pi_p) mean loss(-g) over negatives,
/// pooling the labeled rows of both sides.
BatchObjective supervised_batch_objective(std::span<const double> out_first, std::span<const int> labels_first,
                                          std::span<const double> out_second, std::span<const int> labels_second,
                                          double pi_p, LossKind loss);

struct TrainConfig {
  Architecture arch = Architecture::linear(1);
  OptimizerConfig optimizer = AdamConfig{};
  MethodSpec method = MethodSpec::unbiased();
  LossKind loss = LossKind::logistic;
  std::size_t epochs = 200;
  std::size_t batch_size = 500;
  std::uint64_t seed = 0;
  PriorOptions priors;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_risk_uu = 0.0;  // rewritten risk on the full training sets
  double train_risk_cc = 0.0;  // same with the method's correction (identity if none)
  double test_accuracy = 0.0;
  double test_risk01 = 0.0;
  double best_accuracy = 0.0;
};

/// Per mini-batch values, handed to an optional observer.
struct BatchRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double l_pos = 0.0;
  double l_neg = 0.0;
  double unbiased = 0.0;
  double value = 0.0;
};

using BatchObserver = std::function<void(const BatchRecord&)>;

struct TrainingTrace {
  std::vector<EpochRecord> epochs;
  /// Earliest epoch whose full-data rewritten risk is < 0.
  std::optional<std::size_t> first_negative_epoch;
  std::size_t batches_checked = 0;
  /// Batches where the corrected objective failed to dominate the unbiased one, went
  /// negative, or differed from it with both groups non-negative.
  std::size_t batch_violations = 0;

  bool empty() const noexcept { return epochs.empty(); }
  double final_accuracy() const;
  /// Epoch of the (first) best test accuracy.
  std::size_t best_epoch() const;
};

struct EvalResult {
  double accuracy = 0.0;
  double zero_one_risk = 0.0;
};

/// Throws InsufficientDataError on an empty pool.
EvalResult evaluate(const Model& model, const LabeledPool& test);

/// Best accuracy over all epochs minus final accuracy. Throws on an empty trace.
double accuracy_drop(const TrainingTrace& trace);

struct TrainResult {
  Model model;
  TrainingTrace trace;
};

/// Mini-batch training on two unlabeled sets. Each step forwards both batches,
/// forms L+ and L-, corrects them, backpropagates f'(L+) dL+ + f'(L-) dL- and
/// steps the optimizer. Full-data risks and test metrics are logged per epoch.
/// Throws TrainingFault on NaN/Inf and ConfigError for supervised_pn.
TrainResult train_uu(const UnlabeledSets& data, const LabeledPool& test, const TrainConfig& config,
                     const BatchObserver& observer = {});
/// Starts from the given model instead of a fresh initialization.
TrainResult train_uu(const UnlabeledSets& data, const LabeledPool& test, const TrainConfig& config, Model initial,
                     const BatchObserver& observer = {});

/// Validation-only supervised reference: same batches and initialization as
/// train_uu, objective computed from the hidden labels.
TrainResult train_supervised_reference(const UUDataset& dataset, const TrainConfig& config);
TrainResult train_supervised_reference(const UUDataset& dataset, const TrainConfig& config, Model initial);

/// Header `epoch,train_risk_uu,train_risk_cc,test_acc,test_risk01,best_acc`, one row per epoch.
void write_trace_csv(std::ostream& out, const TrainingTrace& trace);
/// final_acc, best_acc, delta_a, first_negative_epoch, overfit_onset_epoch, ...
void write_trace_summary(std::ostream& out, const TrainingTrace& trace);

}  // namespace uucc
