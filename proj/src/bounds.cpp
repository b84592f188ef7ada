#include "uucc/bounds.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "uucc/errors.hpp"
#include "uucc/report.hpp"

namespace uucc {
namespace {

double half_log_root(double x) { return std::sqrt(std::log(x) / 2.0); }

}  // namespace

void BoundInputs::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(alpha)) throw ConfigError("bound input alpha must be > 0");
  if (!positive(beta)) throw ConfigError("bound input beta must be > 0");
  if (!positive(c_loss)) throw ConfigError("bound input c_loss must be > 0");
  if (!positive(l_f)) throw ConfigError("bound input l_f must be > 0");
  if (n == 0 || n_prime == 0) throw ConfigError("bound inputs need n, n_prime >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("bound input delta must lie in (0, 1)");
}

BiasBound bias_bound(const BoundInputs& in) {
  in.validate();
  const auto& k = in.coeffs;
  const double n = static_cast<double>(in.n);
  const double np = static_cast<double>(in.n_prime);
  const double c2 = in.c_loss * in.c_loss;
  const double var_pos = k.a * k.a / n + k.c * k.c / np;
  const double var_neg = k.b * k.b / np + k.d * k.d / n;
  // A zero spread means the group is a constant >= alpha: no mass in the negative region.
  const double pos = var_pos > 0.0 ? std::exp(-2.0 * in.alpha * in.alpha / c2 / var_pos) : 0.0;
  const double neg = var_neg > 0.0 ? std::exp(-2.0 * in.beta * in.beta / c2 / var_neg) : 0.0;
  BiasBound out;
  out.delta_g = pos + neg;
  out.bias_upper = (in.l_f + 1.0) * k.sum() * in.c_loss * out.delta_g;
  return out;
}

double chi_term(const BoundInputs& in) {
  in.validate();
  const auto& k = in.coeffs;
  return (k.a + k.b) / std::sqrt(static_cast<double>(in.n)) + (k.c + k.d) / std::sqrt(static_cast<double>(in.n_prime));
}

double confidence_constant(const BoundInputs& in) {
  in.validate();
  return in.c_loss * in.l_f * half_log_root(2.0 / in.delta);
}

double deviation_bound(const BoundInputs& in) {
  in.validate();
  return confidence_constant(in) * chi_term(in) + bias_bound(in).bias_upper;
}

double estimation_error_bound_mlp(const BoundInputs& in, std::size_t depth, std::span<const double> frob_norms,
                                  double c_x, double l_loss) {
  in.validate();
  if (frob_norms.size() != depth || depth == 0) {
    throw ConfigError("need one Frobenius norm per layer (depth " + std::to_string(depth) + ", got " +
                      std::to_string(frob_norms.size()) + ")");
  }
  double product = 1.0;
  for (double m : frob_norms) {
    if (!(m >= 0.0)) throw ConfigError("Frobenius norms must be >= 0");
    product *= m;
  }
  const double c_delta_prime = in.c_loss * in.l_f * half_log_root(1.0 / in.delta);
  const double complexity = 8.0 * in.l_f * l_loss * c_x *
                            (std::sqrt(2.0 * static_cast<double>(depth) * std::numbers::ln2) + 1.0) * product;
  return (complexity + 2.0 * c_delta_prime) * chi_term(in) + 2.0 * bias_bound(in).bias_upper;
}

void write_bound_report(std::ostream& out, const BoundInputs& in) {
  const BiasBound bias = bias_bound(in);
  write_kv(out, "theta", in.coeffs.theta);
  write_kv(out, "theta_prime", in.coeffs.theta_prime);
  write_kv(out, "pi_p", in.coeffs.pi_p);
  write_kv(out, "a", in.coeffs.a);
  write_kv(out, "b", in.coeffs.b);
  write_kv(out, "c", in.coeffs.c);
  write_kv(out, "d", in.coeffs.d);
  write_kv(out, "n", in.n);
  write_kv(out, "n_prime", in.n_prime);
  write_kv(out, "alpha", in.alpha);
  write_kv(out, "beta", in.beta);
  write_kv(out, "c_loss", in.c_loss);
  write_kv(out, "l_f", in.l_f);
  write_kv(out, "delta", in.delta);
  write_kv(out, "delta_g", bias.delta_g);
  write_kv(out, "bias_upper", bias.bias_upper);
  write_kv(out, "c_delta", confidence_constant(in));
  write_kv(out, "chi", chi_term(in));
  write_kv(out, "deviation_bound", deviation_bound(in));
}

}  // namespace uucc
