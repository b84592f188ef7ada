#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uucc/loss.hpp"

namespace uucc {

/// Everything an experiment subcommand needs. Defaults describe the desk-scale
/// overlapped-Gaussian setup: 10-D, separation 1.5, theta = 0.6, theta' = 0.4.
struct ExperimentConfig {
  // data
  std::string source = "gaussian";  // gaussian | idx
  std::size_t dim = 10;
  double separation = 1.5;
  std::string idx_images;
  std::string idx_labels;
  std::vector<int> positive_classes;
  bool iid_priors = false;

  // priors and sizes
  double theta = 0.6;
  double theta_prime = 0.4;
  double pi_p = 0.5;
  std::size_t n = 5000;
  std::size_t n_prime = 5000;
  std::size_t n_test = 2000;

  // methods
  std::vector<std::string> methods = {"biased", "unbiased", "corrected"};
  std::vector<double> lambdas = {0.0, -0.5, -1.0};
  LossKind loss = LossKind::logistic;
  std::string model = "mlp";

  // optimization
  std::string optimizer = "adam";
  double lr = 1e-3;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::size_t epochs = 200;
  std::size_t batch_size = 500;

  // runs
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string out = "uucc_out";
  std::size_t jobs = 0;
  double overfit_threshold = 0.01;

  // Monte Carlo
  std::size_t trials = 10000;
  std::vector<std::size_t> mc_sizes = {100, 400, 1600};
  std::size_t true_risk_samples = 1000000;

  // bounds
  std::optional<double> alpha;
  std::optional<double> beta;
  double c_loss = 1.0;
  double delta = 0.05;
  std::vector<double> frob;
  double c_x = 1.0;

  // gradient check
  std::size_t fixtures = 20;
  std::size_t fixture_rows = 8;
  double step = 1e-5;
  double tolerance = 1e-4;
};

/// Sets one key (flag name without the leading dashes; '_' and '-' are
/// interchangeable). Throws UsageError naming the key for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` file with optional `[section]` headers and '#' comments.
/// Throws UsageError on unknown keys or sections.
void load_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Checks the whole configuration for one subcommand (compare, cooccur, mc,
/// bounds, gradcheck). Throws UsageError with the offending key.
void validate_config(const ExperimentConfig& config, std::string_view subcommand);

/// Canonical `key = value` dump of every setting that affects results.
void write_config_echo(std::ostream& out, const ExperimentConfig& config);

struct CommandLine {
  std::string subcommand;
  ExperimentConfig config;
};

/// Parses `<subcommand> [--config FILE] [flags...]` (no program name). File values
/// are applied first, then flags. Throws UsageError; throws HelpRequested for --help.
CommandLine parse_command_line(const std::vector<std::string>& args);

struct HelpRequested {
  std::string text;
};

}  // namespace uucc
