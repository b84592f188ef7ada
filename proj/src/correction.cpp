#include "uucc/correction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "uucc/errors.hpp"

namespace uucc {

CorrectionSpec CorrectionSpec::leaky(double slope) {
  if (!std::isfinite(slope) || slope > 0.0) {
    throw ConfigError("leaky correction slope must be a finite value <= 0 (got " +
                      std::to_string(slope) + "); a positive slope makes f negative");
  }
  return CorrectionSpec(Kind::leaky, slope);
}

double CorrectionSpec::lipschitz() const noexcept {
  return kind_ == Kind::identity ? 1.0 : std::max(1.0, std::fabs(slope_));
}

std::string CorrectionSpec::describe() const {
  switch (kind_) {
    case Kind::identity:
      return "identity";
    case Kind::hard_max:
      return "hard_max";
    case Kind::leaky:
      break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "leaky(%g)", slope_);
  return buf;
}

double correction_apply(const CorrectionSpec& spec, double x) {
  if (!std::isfinite(x)) throw InputDomainError("correction input must be finite");
  if (spec.is_identity() || x >= 0.0) return x;
  if (spec.kind() == CorrectionSpec::Kind::hard_max) return 0.0;
  return spec.slope() * x;
}

double correction_subgrad(const CorrectionSpec& spec, double x) {
  if (!std::isfinite(x)) throw InputDomainError("correction input must be finite");
  if (spec.is_identity() || x >= 0.0) return 1.0;
  return spec.slope();
}

}  // namespace uucc
