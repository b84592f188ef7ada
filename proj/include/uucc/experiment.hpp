#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uucc/config.hpp"
#include "uucc/data.hpp"
#include "uucc/train.hpp"

namespace uucc {

/// The configured methods in order, with "corrected" expanded once per lambda.
std::vector<MethodSpec> expand_methods(const ExperimentConfig& config);

/// Synthetic pool for one seed, sized so both unlabeled sets and the test split fit
/// without sharing rows; or the IDX pool (independent of the seed).
LabeledPool build_pool(const ExperimentConfig& config, std::uint64_t seed);
UUDataset build_dataset(const ExperimentConfig& config, const LabeledPool& pool, std::uint64_t seed);

TrainConfig make_train_config(const ExperimentConfig& config, const MethodSpec& method, std::uint64_t seed,
                              std::size_t input_dim);

struct RunRecord {
  std::string method;
  std::uint64_t seed = 0;
  TrainingTrace trace;
  /// Empty on success, otherwise the fault message.
  std::string fault;

  bool ok() const noexcept { return fault.empty(); }
};

using ObserverFactory = std::function<BatchObserver(const MethodSpec& method, std::uint64_t seed)>;

/// Trains every (method, seed) pair on a bounded worker pool. Methods of one seed
/// share the dataset and the initial weights. A fault in one run is recorded in
/// its RunRecord and does not stop the others. Records come back in
/// seed-major, method-minor order regardless of the worker count.
std::vector<RunRecord> run_sweep(const ExperimentConfig& config, const ObserverFactory& observers = {});

struct SummaryRow {
  std::string method;
  double theta = 0.0;
  double theta_prime = 0.0;
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double drop_mean = 0.0;
  double drop_std = 0.0;
  std::size_t runs = 0;
};

/// Final accuracy and accuracy drop per method, averaged over the successful
/// seeds. Std is the sample standard deviation (0 for a single seed).
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs, double theta, double theta_prime);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct CooccurrenceEntry {
  std::string method;
  std::uint64_t seed = 0;
  std::optional<std::size_t> first_negative_epoch;
  std::size_t overfit_onset_epoch = 0;  // epoch of the best test accuracy
  double delta_a = 0.0;
  bool negative_risk_event = false;
  bool overfitting_event = false;  // delta_a >= threshold

  bool both_events() const noexcept { return negative_risk_event && overfitting_event; }
  /// first_negative_epoch - overfit_onset_epoch when the risk went negative.
  std::optional<long long> gap() const;
};

std::vector<CooccurrenceEntry> cooccurrence(const std::vector<RunRecord>& runs, double overfit_threshold);
void write_cooccurrence_report(std::ostream& out, const std::vector<CooccurrenceEntry>& entries);

/// Subcommands. Each writes into config.out and returns the process exit status.
int run_comparison(const ExperimentConfig& config, std::ostream& log);
int run_cooccurrence(const ExperimentConfig& config, std::ostream& log);
int run_mc(const ExperimentConfig& config, std::ostream& log);
int run_bounds(const ExperimentConfig& config, std::ostream& log);
int run_gradcheck(const ExperimentConfig& config, std::ostream& log);

/// Whole command line without the program name. Returns 0 on success, 1 when a
/// run or check failed, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uucc
