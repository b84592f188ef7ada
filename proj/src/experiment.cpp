#include "uucc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "uucc/bounds.hpp"
#include "uucc/errors.hpp"
#include "uucc/gradcheck.hpp"
#include "uucc/idx.hpp"
#include "uucc/montecarlo.hpp"
#include "uucc/parallel.hpp"
#include "uucc/report.hpp"
#include "uucc/rng.hpp"

namespace uucc {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kPoolStream = 2;
constexpr std::uint64_t kSplitStream = 3;
constexpr std::uint64_t kGradModelStream = 500;
constexpr std::uint64_t kGradFixtureStream = 900;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

fs::path prepare_out_dir(const ExperimentConfig& config) {
  const fs::path dir(config.out);
  fs::create_directories(dir);
  auto echo = open_output(dir / "config.echo");
  write_config_echo(echo, config);
  return dir;
}

std::string run_stem(const RunRecord& run) { return run.method + "_" + std::to_string(run.seed); }

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

/// Runs the sweep and writes traces, per-run summaries and manifests. Returns the
/// records; faults are reported to `log` and `faults.txt`.
std::vector<RunRecord> sweep_and_write(const ExperimentConfig& config, const fs::path& dir, std::ostream& log) {
  std::vector<RunRecord> runs = run_sweep(config);
  std::ostringstream faults;
  for (const auto& run : runs) {
    if (!run.ok()) {
      faults << "method=" << run.method << " seed=" << run.seed << " fault=" << run.fault << '\n';
      log << "run " << run.method << " seed " << run.seed << " failed: " << run.fault << '\n';
    }
    // A failed run still leaves the epochs it finished.
    auto trace = open_output(dir / ("trace_" + run_stem(run) + ".csv"));
    write_trace_csv(trace, run.trace);
    if (run.ok()) {
      auto summary = open_output(dir / ("run_" + run_stem(run) + ".txt"));
      write_trace_summary(summary, run.trace);
      log << "run " << run.method << " seed " << run.seed << ": final_acc=" << format_real(run.trace.final_accuracy())
          << " delta_a=" << format_real(accuracy_drop(run.trace)) << '\n';
    }
  }
  if (!faults.str().empty()) {
    auto f = open_output(dir / "faults.txt");
    f << faults.str();
  }
  return runs;
}

bool all_ok(const std::vector<RunRecord>& runs) {
  return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.ok(); });
}

}  // namespace

std::vector<MethodSpec> expand_methods(const ExperimentConfig& config) {
  std::vector<MethodSpec> out;
  for (const auto& name : config.methods) {
    if (name == "biased") {
      out.push_back(MethodSpec::biased());
    } else if (name == "unbiased") {
      out.push_back(MethodSpec::unbiased());
    } else if (name == "corrected") {
      for (double lambda : config.lambdas) out.push_back(MethodSpec::corrected(correction_for_lambda(lambda)));
    } else {
      throw UsageError("method", "unknown method '" + name + "'");
    }
  }
  return out;
}

LabeledPool build_pool(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.source == "idx") {
    return pool_from_idx(config.idx_images, config.idx_labels, config.positive_classes);
  }
  return gaussian_pool(config.dim, config.separation, config.n + config.n_prime + config.n_test,
                       derive_seed(seed, kPoolStream));
}

UUDataset build_dataset(const ExperimentConfig& config, const LabeledPool& pool, std::uint64_t seed) {
  if (pool.size() == 0) throw InsufficientDataError("empty labeled pool");
  if (config.n_test >= pool.size()) throw CapacityError("test split would consume the whole pool");
  const double test_fraction = static_cast<double>(config.n_test) / static_cast<double>(pool.size());
  UUSamplingOptions options;
  options.iid_priors = config.iid_priors;
  return make_uu_datasets(pool, config.theta, config.theta_prime, config.pi_p, config.n, config.n_prime,
                          test_fraction, derive_seed(seed, kSplitStream), options);
}

TrainConfig make_train_config(const ExperimentConfig& config, const MethodSpec& method, std::uint64_t seed,
                              std::size_t input_dim) {
  TrainConfig tc;
  tc.arch = Architecture::parse(config.model, input_dim);
  if (config.optimizer == "sgd") {
    tc.optimizer = SgdMomentumConfig{config.lr, config.momentum, config.weight_decay};
  } else if (config.optimizer == "adam") {
    AdamConfig adam;
    adam.lr = config.lr;
    adam.weight_decay = config.weight_decay;
    tc.optimizer = adam;
  } else {
    throw UsageError("optimizer", "unknown optimizer '" + config.optimizer + "'");
  }
  tc.method = method;
  tc.loss = config.loss;
  tc.epochs = config.epochs;
  tc.batch_size = config.batch_size;
  tc.seed = seed;
  return tc;
}

std::vector<RunRecord> run_sweep(const ExperimentConfig& config, const ObserverFactory& observers) {
  const std::vector<MethodSpec> methods = expand_methods(config);
  if (methods.empty()) throw UsageError("method", "method list is empty");

  std::optional<LabeledPool> shared_pool;
  if (config.source == "idx") shared_pool = build_pool(config, 0);
  std::vector<UUDataset> datasets;
  datasets.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) {
    datasets.push_back(shared_pool ? build_dataset(config, *shared_pool, seed)
                                   : build_dataset(config, build_pool(config, seed), seed));
  }

  std::vector<RunRecord> runs(config.seeds.size() * methods.size());
  parallel_for(runs.size(), config.jobs, [&](std::size_t job) {
    const std::size_t si = job / methods.size();
    const MethodSpec& method = methods[job % methods.size()];
    RunRecord& run = runs[job];
    run.method = method.name();
    run.seed = config.seeds[si];
    const UUDataset& data = datasets[si];
    try {
      const TrainConfig tc = make_train_config(config, method, run.seed, data.unlabeled().x_tr.cols());
      const BatchObserver observer = observers ? observers(method, run.seed) : BatchObserver{};
      run.trace = train_uu(data.unlabeled(), data.test(), tc, observer).trace;
    } catch (const std::exception& e) {
      run.fault = e.what();
    }
  });
  return runs;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs, double theta, double theta_prime) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> accs, drops;
  for (const auto& run : runs) {
    if (!run.ok() || run.trace.empty()) continue;
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) { return r.method == run.method; });
    std::size_t idx = static_cast<std::size_t>(it - rows.begin());
    if (it == rows.end()) {
      SummaryRow row;
      row.method = run.method;
      row.theta = theta;
      row.theta_prime = theta_prime;
      rows.push_back(row);
      accs.emplace_back();
      drops.emplace_back();
    }
    accs[idx].push_back(run.trace.final_accuracy());
    drops[idx].push_back(accuracy_drop(run.trace));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].runs = accs[i].size();
    rows[i].acc_mean = mean_of(accs[i]);
    rows[i].acc_std = sample_std(accs[i], rows[i].acc_mean);
    rows[i].drop_mean = mean_of(drops[i]);
    rows[i].drop_std = sample_std(drops[i], rows[i].drop_mean);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,theta,theta_prime,acc_mean,acc_std,drop_mean,drop_std\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_real(r.theta) << ',' << format_real(r.theta_prime) << ','
        << format_real(r.acc_mean) << ',' << format_real(r.acc_std) << ',' << format_real(r.drop_mean) << ','
        << format_real(r.drop_std) << '\n';
  }
}

std::optional<long long> CooccurrenceEntry::gap() const {
  if (!first_negative_epoch) return std::nullopt;
  return static_cast<long long>(*first_negative_epoch) - static_cast<long long>(overfit_onset_epoch);
}

std::vector<CooccurrenceEntry> cooccurrence(const std::vector<RunRecord>& runs, double overfit_threshold) {
  std::vector<CooccurrenceEntry> out;
  for (const auto& run : runs) {
    if (!run.ok() || run.trace.empty()) continue;
    CooccurrenceEntry e;
    e.method = run.method;
    e.seed = run.seed;
    e.first_negative_epoch = run.trace.first_negative_epoch;
    e.overfit_onset_epoch = run.trace.best_epoch();
    e.delta_a = accuracy_drop(run.trace);
    e.negative_risk_event = e.first_negative_epoch.has_value();
    e.overfitting_event = e.delta_a >= overfit_threshold;
    out.push_back(e);
  }
  return out;
}

void write_cooccurrence_report(std::ostream& out, const std::vector<CooccurrenceEntry>& entries) {
  for (const auto& e : entries) {
    const std::string p = e.method + ".seed" + std::to_string(e.seed) + ".";
    write_kv(out, p + "first_negative_epoch", e.first_negative_epoch);
    write_kv(out, p + "overfit_onset_epoch", e.overfit_onset_epoch);
    const auto gap = e.gap();
    write_kv(out, p + "gap", gap ? std::to_string(*gap) : std::string("none"));
    write_kv(out, p + "delta_a", e.delta_a);
    write_kv(out, p + "negative_risk_event", e.negative_risk_event ? "yes" : "no");
    write_kv(out, p + "overfitting_event", e.overfitting_event ? "yes" : "no");
    write_kv(out, p + "both_events", e.both_events() ? "yes" : "no");
  }
}

int run_comparison(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, "compare");
  const fs::path dir = prepare_out_dir(config);
  const std::vector<RunRecord> runs = sweep_and_write(config, dir, log);
  auto summary = open_output(dir / "summary.csv");
  write_summary_csv(summary, summarize(runs, config.theta, config.theta_prime));
  return all_ok(runs) ? 0 : 1;
}

int run_cooccurrence(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, "cooccur");
  const fs::path dir = prepare_out_dir(config);
  const std::vector<RunRecord> runs = sweep_and_write(config, dir, log);
  const auto entries = cooccurrence(runs, config.overfit_threshold);
  auto report = open_output(dir / "cooccur.txt");
  write_cooccurrence_report(report, entries);
  write_cooccurrence_report(log, entries);
  return all_ok(runs) ? 0 : 1;
}

int run_mc(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, "mc");
  const fs::path dir = prepare_out_dir(config);
  const McReport report = run_estimator_mc(config);
  auto txt = open_output(dir / "mc.txt");
  write_mc_report(txt, report);
  auto csv = open_output(dir / "mc.csv");
  write_mc_csv(csv, report);
  write_mc_report(log, report);
  return report.total_violations() == 0 ? 0 : 1;
}

int run_bounds(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, "bounds");
  const fs::path dir = prepare_out_dir(config);
  std::ostringstream text;
  const RiskCoefficients coeffs = compute_coefficients(config.theta, config.theta_prime, config.pi_p);
  const std::vector<double> lambdas = config.lambdas.empty() ? std::vector<double>{0.0} : config.lambdas;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (i) text << '\n';
    BoundInputs in;
    in.alpha = *config.alpha;
    in.beta = *config.beta;
    in.c_loss = config.c_loss;
    in.l_f = correction_for_lambda(lambdas[i]).lipschitz();
    in.coeffs = coeffs;
    in.n = config.n;
    in.n_prime = config.n_prime;
    in.delta = config.delta;
    in.validate();
    write_kv(text, "lambda", lambdas[i]);
    write_bound_report(text, in);
    if (!config.frob.empty()) {
      write_kv(text, "depth", config.frob.size());
      write_kv(text, "c_x", config.c_x);
      write_kv(text, "l_loss", loss_lipschitz(config.loss));
      write_kv(text, "estimation_error_bound",
               estimation_error_bound_mlp(in, config.frob.size(), config.frob, config.c_x, loss_lipschitz(config.loss)));
    }
  }
  auto out = open_output(dir / "bounds.txt");
  out << text.str();
  log << text.str();
  return 0;
}

int run_gradcheck(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, "gradcheck");
  const fs::path dir = prepare_out_dir(config);
  const std::vector<MethodSpec> methods = expand_methods(config);
  const RiskCoefficients coeffs = compute_coefficients(config.theta, config.theta_prime, config.pi_p);
  const Architecture arch = Architecture::parse(config.model, config.dim);
  const std::uint64_t seed = config.seeds.empty() ? 0 : config.seeds.front();

  auto csv = open_output(dir / "gradcheck.csv");
  csv << "method,fixture,branch,l_pos,l_neg,checked,skipped,max_relative_error\n";
  double worst = 0.0;
  for (const auto& method : methods) {
    double method_worst = 0.0;
    std::size_t checked = 0, skipped = 0;
    for (std::size_t i = 0; i < config.fixtures; ++i) {
      const Model model = Model::init(arch, derive_seed(seed, kGradModelStream + i));
      const FixtureBranch branch = i % 2 == 0 ? FixtureBranch::negative : FixtureBranch::positive;
      const GradCheckFixture fixture = make_branch_fixture(model, coeffs, config.loss, config.fixture_rows, branch,
                                                           derive_seed(seed, kGradFixtureStream + i));
      const GradCheckResult r = grad_check(model, method, config.loss, fixture, config.step);
      csv << method.name() << ',' << i << ',' << (branch == FixtureBranch::negative ? "negative" : "positive") << ','
          << format_real(r.l_pos) << ',' << format_real(r.l_neg) << ',' << r.checked << ',' << r.skipped << ','
          << format_real(r.max_relative_error) << '\n';
      method_worst = std::max(method_worst, r.max_relative_error);
      checked += r.checked;
      skipped += r.skipped;
    }
    log << method.name() << ": max_relative_error=" << format_real(method_worst) << " checked=" << checked
        << " skipped=" << skipped << (method_worst < config.tolerance ? " ok" : " FAILED") << '\n';
    worst = std::max(worst, method_worst);
  }
  return worst < config.tolerance ? 0 : 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CommandLine cmd;
  try {
    cmd = parse_command_line(args);
  } catch (const HelpRequested& help) {
    out << help.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun `uucc --help` for the list of options\n";
    return 2;
  }
  try {
    if (cmd.subcommand == "compare") return run_comparison(cmd.config, out);
    if (cmd.subcommand == "cooccur") return run_cooccurrence(cmd.config, out);
    if (cmd.subcommand == "mc") return run_mc(cmd.config, out);
    if (cmd.subcommand == "bounds") return run_bounds(cmd.config, out);
    return run_gradcheck(cmd.config, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace uucc
