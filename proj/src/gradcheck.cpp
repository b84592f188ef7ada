#include "uucc/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "uucc/errors.hpp"
#include "uucc/rng.hpp"

namespace uucc {
namespace {

struct Probe {
  double value = 0.0;
  bool pos_negative = false;
  bool neg_negative = false;
  std::vector<bool> relu_mask;
};

Probe probe(const Model& model, const MethodSpec& method, LossKind loss, const GradCheckFixture& fixture) {
  const ForwardPass a = model.forward(fixture.first);
  const ForwardPass b = model.forward(fixture.second);
  const BatchObjective obj = batch_objective(fixture.coeffs, a.outputs, b.outputs, method, loss);
  Probe p;
  p.value = obj.value;
  p.pos_negative = obj.l_pos < 0.0;
  p.neg_negative = obj.l_neg < 0.0;
  for (const auto* pass : {&a, &b}) {
    for (const auto& z : pass->cache.pre_activations) {
      for (double v : z.flat()) p.relu_mask.push_back(v > 0.0);
    }
  }
  return p;
}

}  // namespace

GradCheckResult grad_check(const Model& model, const MethodSpec& method, LossKind loss,
                           const GradCheckFixture& fixture, double step, double floor) {
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be > 0");
  if (!is_differentiable(loss)) throw ConfigError("gradient check needs a differentiable loss");

  Model work = model;
  work.zero_grads();
  const ForwardPass a = work.forward(fixture.first);
  const ForwardPass b = work.forward(fixture.second);
  const BatchObjective obj = batch_objective(fixture.coeffs, a.outputs, b.outputs, method, loss);
  work.backward(a.cache, obj.grad_first);
  work.backward(b.cache, obj.grad_second);

  std::vector<double> analytic;
  for (const auto& layer : work.layers()) {
    analytic.insert(analytic.end(), layer.weight_grad.flat().begin(), layer.weight_grad.flat().end());
    analytic.insert(analytic.end(), layer.bias_grad.begin(), layer.bias_grad.end());
  }

  GradCheckResult result;
  result.l_pos = obj.l_pos;
  result.l_neg = obj.l_neg;
  const bool kinked_correction = !method.correction().is_identity() && method.kind() == MethodSpec::Kind::uu_corrected;

  for (std::size_t p = 0; p < analytic.size(); ++p) {
    const double original = work.parameter(p);
    work.set_parameter(p, original + step);
    const Probe plus = probe(work, method, loss, fixture);
    work.set_parameter(p, original - step);
    const Probe minus = probe(work, method, loss, fixture);
    work.set_parameter(p, original);

    const bool crossed = plus.relu_mask != minus.relu_mask ||
                         (kinked_correction && (plus.pos_negative != minus.pos_negative ||
                                                plus.neg_negative != minus.neg_negative));
    if (crossed) {
      ++result.skipped;
      continue;
    }
    const double numeric = (plus.value - minus.value) / (2.0 * step);
    const double scale = std::max({std::fabs(analytic[p]), std::fabs(numeric), floor});
    result.max_relative_error = std::max(result.max_relative_error, std::fabs(analytic[p] - numeric) / scale);
    ++result.checked;
  }
  return result;
}

GradCheckFixture make_branch_fixture(const Model& model, const RiskCoefficients& coeffs, LossKind loss,
                                     std::size_t rows, FixtureBranch branch, std::uint64_t seed) {
  if (rows == 0) throw ConfigError("fixture needs at least one row per side");
  const std::size_t dim = model.architecture().input_dim();
  const std::size_t count = std::max<std::size_t>(16 * rows, 256);
  Rng rng(seed);
  Matrix base(count, dim);
  for (double& v : base.flat()) v = rng.normal();

  // With biases at zero a ReLU network is positively homogeneous, so scaling the
  // inputs stretches the output spread; biased models still grow roughly linearly.
  double scale = 1.0;
  for (int attempt = 0; attempt < 40; ++attempt, scale *= 2.0) {
    Matrix candidates = base;
    for (double& v : candidates.flat()) v *= scale;
    const std::vector<double> out = model.outputs(candidates);
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return out[x] > out[y]; });

    std::vector<std::size_t> high(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rows));
    std::vector<std::size_t> low(order.end() - static_cast<std::ptrdiff_t>(rows), order.end());
    // The role of "first set" follows the larger prior.
    const bool first_high = (branch == FixtureBranch::negative) != coeffs.swapped;
    GradCheckFixture fixture;
    fixture.coeffs = coeffs;
    fixture.first = candidates.gather_rows(first_high ? high : low);
    fixture.second = candidates.gather_rows(first_high ? low : high);

    const BatchObjective obj = batch_objective(coeffs, model.outputs(fixture.first), model.outputs(fixture.second),
                                               MethodSpec::unbiased(), loss);
    const bool ok = branch == FixtureBranch::negative ? (obj.l_pos < 0.0 && obj.l_neg < 0.0)
                                                      : (obj.l_pos > 0.0 && obj.l_neg > 0.0);
    if (ok) return fixture;
  }
  throw ContractViolation("could not arrange a fixture on the requested correction branch");
}

}  // namespace uucc
