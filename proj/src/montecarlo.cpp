#include "uucc/montecarlo.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "uucc/bounds.hpp"
#include "uucc/errors.hpp"
#include "uucc/report.hpp"
#include "uucc/risk.hpp"
#include "uucc/rng.hpp"

namespace uucc {
namespace {

/// Welford accumulator.
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const { return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

}  // namespace

std::vector<double> FixedClassifier::outputs(const Matrix& inputs) const {
  if (inputs.cols() != weight.size()) throw ShapeError("classifier weight does not match the input dimension");
  std::vector<double> out(inputs.rows(), bias);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const auto row = inputs.row(r);
    for (std::size_t j = 0; j < weight.size(); ++j) out[r] += weight[j] * row[j];
  }
  return out;
}

FixedClassifier bayes_threshold(std::size_t dim) {
  if (dim == 0) throw ConfigError("dimension must be >= 1");
  FixedClassifier g;
  g.weight.assign(dim, 0.0);
  g.weight[0] = 1.0;
  return g;
}

CorrectionSpec correction_for_lambda(double lambda) {
  return lambda == 0.0 ? CorrectionSpec::hard_max() : CorrectionSpec::leaky(lambda);
}

TrueRisk labeled_true_risk(const GaussianSource& source, const FixedClassifier& g, double pi_p, LossKind loss,
                           std::size_t samples, std::uint64_t seed) {
  source.validate();
  if (samples < 2) throw ConfigError("true risk needs at least two samples");
  if (!(pi_p > 0.0 && pi_p < 1.0)) throw ConfigError("pi_p must lie in (0, 1)");
  if (g.weight.size() != source.dim) throw ShapeError("classifier weight does not match the source dimension");

  Moments pos, neg;
  Rng rng(seed);
  std::vector<double> x(source.dim);
  const std::size_t per_class = samples / 2;
  for (std::size_t i = 0; i < per_class; ++i) {
    source.sample(+1, rng, x);
    double out = g.bias;
    for (std::size_t j = 0; j < x.size(); ++j) out += g.weight[j] * x[j];
    pos.add(loss_eval(loss, out));
  }
  for (std::size_t i = 0; i < samples - per_class; ++i) {
    source.sample(-1, rng, x);
    double out = g.bias;
    for (std::size_t j = 0; j < x.size(); ++j) out += g.weight[j] * x[j];
    neg.add(loss_eval(loss, -out));
  }
  const double pi_n = 1.0 - pi_p;
  TrueRisk t;
  t.samples = samples;
  t.risk_pos = pos.mean;
  t.risk_neg = neg.mean;
  t.alpha = pi_p * pos.mean;
  t.beta = pi_n * neg.mean;
  t.risk = t.alpha + t.beta;
  t.std_error = std::sqrt(pi_p * pi_p * pos.variance() / static_cast<double>(pos.count) +
                          pi_n * pi_n * neg.variance() / static_cast<double>(neg.count));
  return t;
}

std::size_t McReport::total_violations() const noexcept {
  std::size_t total = 0;
  for (const auto& s : sizes) {
    for (const auto& c : s.corrected) total += c.violations;
  }
  return total;
}

McReport run_estimator_mc(const ExperimentConfig& config) {
  if (config.source != "gaussian") throw UsageError("source", "Monte Carlo needs the synthetic source");
  if (config.trials == 0) throw UsageError("trials", "must be >= 1");
  if (config.seeds.empty()) throw UsageError("seed", "seed list is empty");

  const GaussianSource source{config.dim, config.separation};
  source.validate();
  const FixedClassifier g = bayes_threshold(config.dim);
  const std::uint64_t seed = config.seeds.front();

  McReport report;
  report.coeffs = compute_coefficients(config.theta, config.theta_prime, config.pi_p);
  report.truth = labeled_true_risk(source, g, config.pi_p, config.loss, config.true_risk_samples, derive_seed(seed, 1));
  report.loss = config.loss;
  report.c_loss = config.c_loss;
  report.trials = config.trials;

  std::vector<CorrectionSpec> corrections;
  for (double lambda : config.lambdas) corrections.push_back(correction_for_lambda(lambda));

  for (std::size_t si = 0; si < config.mc_sizes.size(); ++si) {
    const std::size_t size = config.mc_sizes[si];
    McSizeStats stats;
    stats.n = size;
    stats.n_prime = size;
    Moments uu;
    std::vector<Moments> cc(corrections.size()), gap(corrections.size());
    std::vector<std::size_t> violations(corrections.size(), 0);

    const std::uint64_t size_seed = derive_seed(seed, 100 + si);
    for (std::size_t t = 0; t < config.trials; ++t) {
      Rng rng(derive_seed(size_seed, t));
      const Matrix first = source.sample_mixture(config.theta, size, config.iid_priors, rng);
      const Matrix second = source.sample_mixture(config.theta_prime, size, config.iid_priors, rng);
      const UURiskParts parts = uu_risk_parts(report.coeffs, g.outputs(first), g.outputs(second), config.loss);
      const double r_uu = uu_unbiased_risk(parts);
      uu.add(r_uu);
      const bool both_nonneg = parts.positive_group() >= 0.0 && parts.negative_group() >= 0.0;
      if (!both_nonneg) ++stats.negative_resamples;
      if (r_uu < 0.0) ++stats.negative_risk_resamples;
      for (std::size_t k = 0; k < corrections.size(); ++k) {
        const double r_cc = uu_corrected_risk(parts, corrections[k]).value;
        cc[k].add(r_cc);
        gap[k].add(r_cc - r_uu);
        if (r_cc < 0.0 || r_cc < r_uu || (both_nonneg && r_cc != r_uu)) ++violations[k];
      }
    }

    stats.mean_uu = uu.mean;
    stats.std_error_uu = uu.std_error();
    stats.z_uu = stats.std_error_uu > 0.0 ? (uu.mean - report.truth.risk) / stats.std_error_uu : 0.0;

    for (std::size_t k = 0; k < corrections.size(); ++k) {
      McCorrectedStats c;
      c.lambda = config.lambdas[k];
      c.mean = cc[k].mean;
      c.std_error = cc[k].std_error();
      c.bias = gap[k].mean;
      c.bias_std_error = gap[k].std_error();
      c.bias_raw = cc[k].mean - report.truth.risk;
      c.violations = violations[k];
      if (report.truth.alpha > 0.0 && report.truth.beta > 0.0) {
        BoundInputs in;
        in.alpha = report.truth.alpha;
        in.beta = report.truth.beta;
        in.c_loss = config.c_loss;
        in.l_f = corrections[k].lipschitz();
        in.coeffs = report.coeffs;
        in.n = size;
        in.n_prime = size;
        in.delta = config.delta;
        const BiasBound bound = bias_bound(in);
        c.delta_g = bound.delta_g;
        c.bias_upper = bound.bias_upper;
      } else {
        c.delta_g = std::nan("");
        c.bias_upper = std::nan("");
      }
      stats.corrected.push_back(c);
    }
    report.sizes.push_back(std::move(stats));
  }
  return report;
}

void write_mc_report(std::ostream& out, const McReport& report) {
  write_kv(out, "loss", to_string(report.loss));
  write_kv(out, "c_loss", report.c_loss);
  write_kv(out, "theta", report.coeffs.theta);
  write_kv(out, "theta_prime", report.coeffs.theta_prime);
  write_kv(out, "pi_p", report.coeffs.pi_p);
  write_kv(out, "trials", report.trials);
  write_kv(out, "true_risk", report.truth.risk);
  write_kv(out, "true_risk_std_error", report.truth.std_error);
  write_kv(out, "true_risk_samples", report.truth.samples);
  write_kv(out, "alpha", report.truth.alpha);
  write_kv(out, "beta", report.truth.beta);
  for (const auto& s : report.sizes) {
    const std::string p = "n" + std::to_string(s.n) + ".";
    write_kv(out, p + "mean_uu", s.mean_uu);
    write_kv(out, p + "std_error_uu", s.std_error_uu);
    write_kv(out, p + "z_uu", s.z_uu);
    write_kv(out, p + "negative_group_resamples", s.negative_resamples);
    write_kv(out, p + "negative_risk_resamples", s.negative_risk_resamples);
    for (const auto& c : s.corrected) {
      const std::string q = p + "lambda" + format_real(c.lambda) + ".";
      write_kv(out, q + "mean_cc", c.mean);
      write_kv(out, q + "std_error_cc", c.std_error);
      write_kv(out, q + "bias", c.bias);
      write_kv(out, q + "bias_std_error", c.bias_std_error);
      write_kv(out, q + "bias_raw", c.bias_raw);
      write_kv(out, q + "delta_g", c.delta_g);
      write_kv(out, q + "bias_upper", c.bias_upper);
      write_kv(out, q + "violations", c.violations);
    }
  }
  write_kv(out, "total_violations", report.total_violations());
}

void write_mc_csv(std::ostream& out, const McReport& report) {
  out << "n,n_prime,lambda,true_risk,mean_uu,std_error_uu,mean_cc,bias,bias_std_error,bias_raw,bias_upper,"
         "violations\n";
  for (const auto& s : report.sizes) {
    for (const auto& c : s.corrected) {
      out << s.n << ',' << s.n_prime << ',' << format_real(c.lambda) << ',' << format_real(report.truth.risk) << ','
          << format_real(s.mean_uu) << ',' << format_real(s.std_error_uu) << ',' << format_real(c.mean) << ','
          << format_real(c.bias) << ',' << format_real(c.bias_std_error) << ',' << format_real(c.bias_raw) << ','
          << format_real(c.bias_upper) << ',' << c.violations << '\n';
    }
  }
}

}  // namespace uucc
