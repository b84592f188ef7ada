#include "uucc/coefficients.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "uucc/errors.hpp"

namespace uucc {
namespace {

void check_prior(const char* name, double value, bool allow_boundary) {
  const bool inside = allow_boundary ? (value >= 0.0 && value <= 1.0) : (value > 0.0 && value < 1.0);
  if (!std::isfinite(value) || !inside) {
    throw ConfigError(std::string(name) + " must lie in " + (allow_boundary ? "[0, 1]" : "(0, 1)") +
                      ", got " + std::to_string(value));
  }
}

}  // namespace

RiskCoefficients compute_coefficients(double theta, double theta_prime, double pi_p,
                                      const PriorOptions& options) {
  check_prior("theta", theta, options.allow_boundary);
  check_prior("theta_prime", theta_prime, options.allow_boundary);
  check_prior("pi_p", pi_p, options.allow_boundary);
  if (std::fabs(theta - theta_prime) <= options.min_gap) {
    throw DegeneratePriorsError("theta and theta_prime must differ by more than " +
                                std::to_string(options.min_gap));
  }

  RiskCoefficients k;
  if (theta < theta_prime) {
    std::swap(theta, theta_prime);
    k.swapped = true;
  }
  k.theta = theta;
  k.theta_prime = theta_prime;
  k.pi_p = pi_p;
  const double gap = theta - theta_prime;
  const double pi_n = 1.0 - pi_p;
  k.a = (1.0 - theta_prime) * pi_p / gap;
  k.b = theta_prime * pi_n / gap;
  k.c = (1.0 - theta) * pi_p / gap;
  k.d = theta * pi_n / gap;
  return k;
}

}  // namespace uucc
