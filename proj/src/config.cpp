#include "uucc/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "uucc/coefficients.hpp"
#include "uucc/errors.hpp"
#include "uucc/report.hpp"

namespace uucc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string_view key) {
  std::string k(trim(key));
  while (k.starts_with("-")) k.erase(0, 1);
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw UsageError(std::string(key), "invalid value '" + std::string(value) + "' (expected " + std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) bad_value(key, text, "a real number");
  return v;
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) bad_value(key, text, "a non-negative integer");
  return v;
}

std::size_t to_size(std::string_view key, std::string_view text) { return static_cast<std::size_t>(to_u64(key, text)); }

bool to_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text.empty()) return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, text, "true or false");
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> items;
  text = trim(text);
  if (text.empty()) return items;
  while (true) {
    const auto comma = text.find(',');
    items.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return items;
}

template <typename T, typename Parse>
std::vector<T> to_list(std::string_view key, std::string_view text, Parse parse) {
  std::vector<T> out;
  for (auto item : split_list(text)) out.push_back(parse(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_same_v<T, double>) {
      s += format_real(items[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      s += items[i];
    } else {
      s += std::to_string(items[i]);
    }
  }
  return s;
}

struct KeySpec {
  const char* name;
  const char* help;
  void (*set)(ExperimentConfig&, std::string_view key, std::string_view value);
  std::string (*get)(const ExperimentConfig&);
  bool flag = false;
  bool echo = true;
};

// clang-format off
const std::array kKeys = {
  KeySpec{"source", "data source: gaussian or idx",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      v = trim(v);
      if (v != "gaussian" && v != "idx") bad_value(k, v, "gaussian or idx");
      c.source = std::string(v); },
    [](const ExperimentConfig& c) { return c.source; }},
  KeySpec{"dim", "gaussian input dimension",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.dim = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.dim); }},
  KeySpec{"separation", "distance between the gaussian class means",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.separation = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.separation); }},
  KeySpec{"idx-images", "IDX image file (selects the idx source)",
    [](ExperimentConfig& c, std::string_view, std::string_view v) { c.idx_images = std::string(trim(v)); c.source = "idx"; },
    [](const ExperimentConfig& c) { return c.idx_images; }},
  KeySpec{"idx-labels", "IDX label file",
    [](ExperimentConfig& c, std::string_view, std::string_view v) { c.idx_labels = std::string(trim(v)); },
    [](const ExperimentConfig& c) { return c.idx_labels; }},
  KeySpec{"positive-classes", "comma-separated class ids mapped to the positive label",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.positive_classes = to_list<int>(k, v, [](std::string_view kk, std::string_view x) {
        return static_cast<int>(to_u64(kk, x)); }); },
    [](const ExperimentConfig& c) { return join(c.positive_classes); }},
  KeySpec{"iid-priors", "draw set labels i.i.d. Bernoulli(theta) instead of exact counts",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.iid_priors = to_bool(k, v); },
    [](const ExperimentConfig& c) { return std::string(c.iid_priors ? "true" : "false"); }, true},
  KeySpec{"theta", "class prior of the first unlabeled set",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.theta = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.theta); }},
  KeySpec{"theta-prime", "class prior of the second unlabeled set",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.theta_prime = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.theta_prime); }},
  KeySpec{"pi-p", "class prior of the test distribution",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.pi_p = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.pi_p); }},
  KeySpec{"n", "size of the first unlabeled set",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.n = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.n); }},
  KeySpec{"n-prime", "size of the second unlabeled set",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.n_prime = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.n_prime); }},
  KeySpec{"n-test", "size of the labeled test split",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.n_test = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.n_test); }},
  KeySpec{"method", "comma-separated methods: biased, unbiased, corrected",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.methods.clear();
      for (auto m : split_list(v)) {
        if (m != "biased" && m != "unbiased" && m != "corrected") bad_value(k, m, "biased, unbiased or corrected");
        c.methods.emplace_back(m);
      } },
    [](const ExperimentConfig& c) { return join(c.methods); }},
  KeySpec{"lambda", "comma-separated correction slopes <= 0 (0 = hard max, -1 = absolute value)",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.lambdas = to_list<double>(k, v, to_double);
      for (double l : c.lambdas) if (l > 0.0) bad_value(k, v, "slopes <= 0"); },
    [](const ExperimentConfig& c) { return join(c.lambdas); }},
  KeySpec{"loss", "surrogate loss: log or sig",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      v = trim(v);
      if (v != "log" && v != "sig" && v != "logistic" && v != "sigmoid") bad_value(k, v, "log or sig");
      c.loss = parse_loss_kind(v); },
    [](const ExperimentConfig& c) { return std::string(to_string(c.loss)); }},
  KeySpec{"model", "linear, mlp (d-32-32-1) or mlp:<d>,<h1>,...,1",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      v = trim(v);
      if (v != "linear" && v != "mlp" && !v.starts_with("mlp:")) bad_value(k, v, "linear or mlp[:widths]");
      c.model = std::string(v); },
    [](const ExperimentConfig& c) { return c.model; }},
  KeySpec{"optimizer", "sgd (with momentum) or adam",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      v = trim(v);
      if (v != "sgd" && v != "adam") bad_value(k, v, "sgd or adam");
      c.optimizer = std::string(v); },
    [](const ExperimentConfig& c) { return c.optimizer; }},
  KeySpec{"lr", "learning rate",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.lr = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.lr); }},
  KeySpec{"momentum", "sgd momentum",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.momentum = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.momentum); }},
  KeySpec{"weight-decay", "L2 coefficient added to the gradient",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.weight_decay = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.weight_decay); }},
  KeySpec{"epochs", "training epochs",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.epochs = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.epochs); }},
  KeySpec{"batch-size", "mini-batch size (larger set)",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.batch_size = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.batch_size); }},
  KeySpec{"seed", "comma-separated list of trial seeds",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seeds = to_list<std::uint64_t>(k, v, to_u64); },
    [](const ExperimentConfig& c) { return join(c.seeds); }},
  KeySpec{"out", "output directory",
    [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out = std::string(trim(v)); },
    [](const ExperimentConfig& c) { return c.out; }, false, false},
  KeySpec{"jobs", "worker threads (0 = all cores)",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.jobs = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.jobs); }, false, false},
  KeySpec{"overfit-threshold", "accuracy drop that counts as overfitting in cooccur reports",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.overfit_threshold = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.overfit_threshold); }},
  KeySpec{"trials", "Monte Carlo resamples per sample size",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.trials = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.trials); }},
  KeySpec{"mc-sizes", "comma-separated sample sizes n = n' for the Monte Carlo",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.mc_sizes = to_list<std::size_t>(k, v, to_size); },
    [](const ExperimentConfig& c) { return join(c.mc_sizes); }},
  KeySpec{"true-risk-samples", "labeled samples for the ground-truth risk",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.true_risk_samples = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.true_risk_samples); }},
  KeySpec{"alpha", "lower bound on pi_p R_p+(g) (bounds)",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.alpha = to_double(k, v); },
    [](const ExperimentConfig& c) { return c.alpha ? format_real(*c.alpha) : std::string("none"); }},
  KeySpec{"beta", "lower bound on pi_n R_n-(g) (bounds)",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.beta = to_double(k, v); },
    [](const ExperimentConfig& c) { return c.beta ? format_real(*c.beta) : std::string("none"); }},
  KeySpec{"c-loss", "loss ceiling C_l (exact 1 for sig; an assumption for log)",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.c_loss = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.c_loss); }},
  KeySpec{"delta", "confidence parameter in (0, 1)",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.delta = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.delta); }},
  KeySpec{"frob", "comma-separated Frobenius norm bounds, one per layer",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.frob = to_list<double>(k, v, to_double); },
    [](const ExperimentConfig& c) { return join(c.frob); }},
  KeySpec{"c-x", "input norm ceiling",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.c_x = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.c_x); }},
  KeySpec{"fixtures", "gradient-check fixtures per method",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.fixtures = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.fixtures); }},
  KeySpec{"fixture-rows", "rows per side in a gradient-check fixture",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.fixture_rows = to_size(k, v); },
    [](const ExperimentConfig& c) { return std::to_string(c.fixture_rows); }},
  KeySpec{"step", "finite-difference step",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.step = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.step); }},
  KeySpec{"tolerance", "maximum relative gradient error",
    [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.tolerance = to_double(k, v); },
    [](const ExperimentConfig& c) { return format_real(c.tolerance); }},
};
// clang-format on

constexpr std::array<std::string_view, 11> kSections = {"data",  "priors", "model", "method", "methods",  "optim",
                                                        "train", "run",    "mc",    "bounds", "gradcheck"};

constexpr std::array<std::string_view, 5> kSubcommands = {"compare", "cooccur", "mc", "bounds", "gradcheck"};

const KeySpec* find_key(std::string_view key) {
  const std::string norm = normalize_key(key);
  for (const auto& spec : kKeys) {
    if (norm == spec.name) return &spec;
  }
  return nullptr;
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw UsageError(key, what);
}

std::string usage_text() {
  std::string s =
      "usage: uucc <compare|cooccur|mc|bounds|gradcheck> [--config FILE] [options]\n\n"
      "  compare    train every (method, seed) pair and write traces plus summary.csv\n"
      "  cooccur    report negative-risk and overfitting events per run\n"
      "  mc         Monte Carlo check of estimator bias on synthetic data\n"
      "  bounds     evaluate the bias/deviation/estimation-error bounds\n"
      "  gradcheck  compare analytic and finite-difference gradients\n\n"
      "options (defaults in brackets):\n";
  ExperimentConfig defaults;
  for (const auto& k : kKeys) {
    std::string line = std::string("  --") + k.name;
    line.resize(std::max<std::size_t>(line.size() + 1, 24), ' ');
    s += line + k.help + " [" + k.get(defaults) + "]\n";
  }
  return s;
}

}  // namespace

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw UsageError(std::string(trim(key)), "unknown setting");
  spec->set(config, spec->name, value);
}

void load_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config", "cannot read config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    if (view.front() == '[') {
      if (view.back() != ']') throw UsageError("config", "malformed section header on line " + std::to_string(line_no));
      const auto name = trim(view.substr(1, view.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), name) == kSections.end())
        throw UsageError(std::string(name), "unknown config section");
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config", "expected 'key = value' on line " + std::to_string(line_no));
    apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
  }
}

void validate_config(const ExperimentConfig& c, std::string_view subcommand) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end())
    throw UsageError("", "unknown subcommand '" + std::string(subcommand) + "'");

  try {
    compute_coefficients(c.theta, c.theta_prime, c.pi_p);
  } catch (const DegeneratePriorsError& e) {
    throw UsageError("theta-prime", std::string("degenerate priors: ") + e.what());
  } catch (const ConfigError& e) {
    throw UsageError("theta", e.what());
  }
  for (double l : c.lambdas) require(l <= 0.0, "lambda", "correction slopes must be <= 0");
  require(c.dim >= 1, "dim", "must be >= 1");
  require(c.separation >= 0.0, "separation", "must be >= 0");

  const bool training = subcommand == "compare" || subcommand == "cooccur";
  if (training || subcommand == "gradcheck") {
    require(!c.methods.empty(), "method", "method list is empty");
    const bool corrected = std::find(c.methods.begin(), c.methods.end(), "corrected") != c.methods.end();
    require(!corrected || !c.lambdas.empty(), "lambda", "corrected method needs at least one lambda");
    require(c.loss != LossKind::zero_one, "loss", "training needs log or sig");
  }
  if (training) {
    require(!c.seeds.empty(), "seed", "seed list is empty");
    require(c.n >= 1, "n", "must be >= 1");
    require(c.n_prime >= 1, "n-prime", "must be >= 1");
    require(c.n_test >= 1, "n-test", "must be >= 1");
    require(c.batch_size >= 2, "batch-size", "must be >= 2");
    require(c.lr > 0.0, "lr", "must be > 0");
    require(c.momentum >= 0.0 && c.momentum < 1.0, "momentum", "must lie in [0, 1)");
    require(c.weight_decay >= 0.0, "weight-decay", "must be >= 0");
    if (c.source == "idx") {
      require(!c.idx_images.empty(), "idx-images", "idx source needs an image file");
      require(!c.idx_labels.empty(), "idx-labels", "idx source needs a label file");
      require(!c.positive_classes.empty(), "positive-classes", "idx source needs the positive class list");
    }
  }
  if (subcommand == "cooccur") {
    require(std::find(c.methods.begin(), c.methods.end(), "unbiased") != c.methods.end(), "method",
            "cooccur needs the unbiased method in the method list");
  }
  if (subcommand == "mc") {
    require(c.source == "gaussian", "source", "mc needs the synthetic source (IDX data has no ground truth)");
    require(c.trials >= 1, "trials", "must be >= 1");
    require(!c.mc_sizes.empty(), "mc-sizes", "size list is empty");
    for (std::size_t s : c.mc_sizes) require(s >= 1, "mc-sizes", "sizes must be >= 1");
    require(c.true_risk_samples >= 2, "true-risk-samples", "must be >= 2");
    require(c.c_loss > 0.0, "c-loss", "must be > 0");
    require(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)");
  }
  if (subcommand == "bounds") {
    require(c.alpha.has_value() && *c.alpha > 0.0, "alpha", "bounds needs --alpha > 0");
    require(c.beta.has_value() && *c.beta > 0.0, "beta", "bounds needs --beta > 0");
    require(c.c_loss > 0.0, "c-loss", "must be > 0");
    require(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)");
    require(c.n >= 1 && c.n_prime >= 1, "n", "sample sizes must be >= 1");
  }
  if (subcommand == "gradcheck") {
    require(c.fixtures >= 1, "fixtures", "must be >= 1");
    require(c.fixture_rows >= 2, "fixture-rows", "must be >= 2");
    require(c.step > 0.0, "step", "must be > 0");
    require(c.tolerance > 0.0, "tolerance", "must be > 0");
  }
}

void write_config_echo(std::ostream& out, const ExperimentConfig& config) {
  for (const auto& k : kKeys) {
    if (k.echo) out << k.name << " = " << k.get(config) << '\n';
  }
}

CommandLine parse_command_line(const std::vector<std::string>& args) {
  if (args.empty() || args.front() == "--help" || args.front() == "-h") throw HelpRequested{usage_text()};
  CommandLine cmd;
  cmd.subcommand = args.front();
  if (std::find(kSubcommands.begin(), kSubcommands.end(), cmd.subcommand) == kSubcommands.end())
    throw UsageError("", "unknown subcommand '" + cmd.subcommand + "'");

  CLI::App app("uucc " + cmd.subcommand);
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value config file; flags override it");
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  for (const auto& k : kKeys) {
    if (k.flag) {
      app.add_flag(std::string("--") + k.name, flags[k.name], k.help);
    } else {
      app.add_option(std::string("--") + k.name, values[k.name], k.help);
    }
  }

  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{usage_text()};
  } catch (const CLI::ParseError& e) {
    throw UsageError("", e.what());
  }

  if (!config_path.empty()) load_config_file(cmd.config, config_path);
  for (const auto& k : kKeys) {
    const std::string flag = std::string("--") + k.name;
    if (app.count(flag) == 0) continue;
    if (k.flag) {
      k.set(cmd.config, k.name, flags[k.name] ? "true" : "false");
    } else {
      k.set(cmd.config, k.name, values[k.name]);
    }
  }
  validate_config(cmd.config, cmd.subcommand);
  return cmd;
}

}  // namespace uucc
