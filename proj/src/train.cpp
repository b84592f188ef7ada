#include "uucc/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "uucc/batching.hpp"
#include "uucc/errors.hpp"
#include "uucc/report.hpp"
#include "uucc/risk.hpp"
#include "uucc/rng.hpp"

namespace uucc {
namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 1000;

double mean_loss(std::span<const double> outputs, double sign, LossKind loss) {
  double sum = 0.0;
  for (double g : outputs) sum += loss_eval(loss, sign * g);
  return sum / static_cast<double>(outputs.size());
}

void require_finite(std::span<const double> values, const char* what, std::size_t epoch, std::size_t batch) {
  for (double v : values) {
    if (!std::isfinite(v)) throw TrainingFault(std::string("non-finite ") + what, epoch, batch);
  }
}

using ObjectiveFn = std::function<BatchObjective(std::span<const double>, std::span<const double>, const BatchPair&)>;

TrainResult run_training(const UnlabeledSets& data, const LabeledPool& test, const TrainConfig& config, Model model,
                         const ObjectiveFn& objective, const BatchObserver& observer) {
  if (config.method.kind() == MethodSpec::Kind::uu_corrected && config.method.correction().kind() ==
                                                                     CorrectionSpec::Kind::leaky &&
      config.method.correction().slope() > 0.0) {
    throw ConfigError("corrected method needs a slope <= 0");
  }
  if (model.architecture() != config.arch) throw ConfigError("initial model does not match the configured architecture");
  if (data.x_tr.cols() != config.arch.input_dim() || data.x_tr_prime.cols() != config.arch.input_dim())
    throw ShapeError("training data dimension does not match the architecture");
  if (!is_differentiable(config.loss)) throw ConfigError("training needs a differentiable loss");

  const RiskCoefficients coeffs = compute_coefficients(data.theta, data.theta_prime, data.pi_p, config.priors);
  const CorrectionSpec& correction = config.method.correction();
  const bool check_batches = config.method.kind() == MethodSpec::Kind::uu_unbiased ||
                             config.method.kind() == MethodSpec::Kind::uu_corrected;

  Optimizer optimizer(config.optimizer, model);
  TrainingTrace trace;
  double best = -1.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const EpochBatches plan = minibatches(data.x_tr.rows(), data.x_tr_prime.rows(), config.batch_size,
                                          derive_seed(config.seed, kShuffleStream + epoch));
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
      const BatchPair& pair = plan.batches[b];
      const Matrix first = data.x_tr.gather_rows(pair.first);
      const Matrix second = data.x_tr_prime.gather_rows(pair.second);
      ForwardPass pass_first = model.forward(first);
      ForwardPass pass_second = model.forward(second);
      require_finite(pass_first.outputs, "model output", epoch, b);
      require_finite(pass_second.outputs, "model output", epoch, b);

      const BatchObjective obj = objective(pass_first.outputs, pass_second.outputs, pair);
      if (!std::isfinite(obj.value)) throw TrainingFault("non-finite objective", epoch, b);

      if (check_batches) {
        ++trace.batches_checked;
        bool ok = obj.value >= obj.unbiased;
        if (!correction.is_identity()) ok = ok && obj.value >= 0.0;
        if (obj.l_pos >= 0.0 && obj.l_neg >= 0.0) ok = ok && obj.value == obj.unbiased;
        if (!ok) ++trace.batch_violations;
      }
      if (observer) observer({epoch, b, obj.l_pos, obj.l_neg, obj.unbiased, obj.value});

      model.backward(pass_first.cache, obj.grad_first);
      model.backward(pass_second.cache, obj.grad_second);
      optimizer.step(model, {epoch, b});
    }

    const auto out_first = model.outputs(data.x_tr);
    const auto out_second = model.outputs(data.x_tr_prime);
    require_finite(out_first, "model output", epoch, plan.batches.size());
    require_finite(out_second, "model output", epoch, plan.batches.size());
    const UURiskParts parts = uu_risk_parts(coeffs, out_first, out_second, config.loss);
    const EvalResult eval = evaluate(model, test);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_risk_uu = uu_unbiased_risk(parts);
    rec.train_risk_cc = uu_corrected_risk(parts, correction).value;
    rec.test_accuracy = eval.accuracy;
    rec.test_risk01 = eval.zero_one_risk;
    best = std::max(best, eval.accuracy);
    rec.best_accuracy = best;
    if (!trace.first_negative_epoch && rec.train_risk_uu < 0.0) trace.first_negative_epoch = epoch;
    trace.epochs.push_back(rec);
  }
  return {std::move(model), std::move(trace)};
}

}  // namespace

std::string MethodSpec::name() const {
  switch (kind_) {
    case Kind::uu_biased:
      return "biased";
    case Kind::uu_unbiased:
      return "unbiased";
    case Kind::supervised_pn:
      return "supervised";
    case Kind::uu_corrected:
      break;
  }
  if (correction_.is_identity()) return "corrected_identity";
  char buf[48];
  std::snprintf(buf, sizeof buf, "corrected_l%g", correction_.slope() == 0.0 ? 0.0 : correction_.slope());
  return buf;
}

BatchObjective batch_objective(const RiskCoefficients& coeffs, std::span<const double> out_first,
                               std::span<const double> out_second, const MethodSpec& method, LossKind loss) {
  if (method.kind() == MethodSpec::Kind::supervised_pn)
    throw ConfigError("supervised objective needs labels; use supervised_batch_objective");
  if (out_first.empty() || out_second.empty()) throw InsufficientDataError("empty mini-batch side");

  const bool swapped = coeffs.swapped;
  if (swapped) std::swap(out_first, out_second);
  const double n1 = static_cast<double>(out_first.size());
  const double n2 = static_cast<double>(out_second.size());

  BatchObjective obj;
  const double pos1 = mean_loss(out_first, +1.0, loss);
  const double neg1 = mean_loss(out_first, -1.0, loss);
  const double pos2 = mean_loss(out_second, +1.0, loss);
  const double neg2 = mean_loss(out_second, -1.0, loss);
  obj.l_pos = coeffs.a * pos1 - coeffs.c * pos2;
  obj.l_neg = coeffs.d * neg2 - coeffs.b * neg1;
  obj.unbiased = obj.l_pos + obj.l_neg;
  obj.grad_first.resize(out_first.size());
  obj.grad_second.resize(out_second.size());

  if (method.kind() == MethodSpec::Kind::uu_biased) {
    obj.value = 0.5 * pos1 + 0.5 * neg2;
    for (std::size_t i = 0; i < out_first.size(); ++i) obj.grad_first[i] = 0.5 * loss_grad(loss, out_first[i]) / n1;
    for (std::size_t j = 0; j < out_second.size(); ++j)
      obj.grad_second[j] = -(0.5 * loss_grad(loss, -out_second[j])) / n2;
  } else {
    const CorrectionSpec& f = method.correction();
    obj.value = correction_apply(f, obj.l_pos) + correction_apply(f, obj.l_neg);
    const double sp = correction_subgrad(f, obj.l_pos);
    const double sn = correction_subgrad(f, obj.l_neg);
    for (std::size_t i = 0; i < out_first.size(); ++i) {
      const double g = out_first[i];
      obj.grad_first[i] = (sp * coeffs.a * loss_grad(loss, g) + sn * coeffs.b * loss_grad(loss, -g)) / n1;
    }
    for (std::size_t j = 0; j < out_second.size(); ++j) {
      const double g = out_second[j];
      obj.grad_second[j] = (-(sp * coeffs.c) * loss_grad(loss, g) - (sn * coeffs.d) * loss_grad(loss, -g)) / n2;
    }
  }

  if (swapped) std::swap(obj.grad_first, obj.grad_second);
  return obj;
}

BatchObjective supervised_batch_objective(std::span<const double> out_first, std::span<const int> labels_first,
                                          std::span<const double> out_second, std::span<const int> labels_second,
                                          double pi_p, LossKind loss) {
  if (out_first.size() != labels_first.size() || out_second.size() != labels_second.size())
    throw ShapeError("outputs and labels differ in length");
  const double pi_n = 1.0 - pi_p;
  std::size_t n_pos = 0, n_neg = 0;
  for (int y : labels_first) (y > 0 ? n_pos : n_neg) += 1;
  for (int y : labels_second) (y > 0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) throw InsufficientDataError("supervised mini-batch needs both classes");
  const double cp = static_cast<double>(n_pos);
  const double cn = static_cast<double>(n_neg);

  BatchObjective obj;
  double sum_pos = 0.0, sum_neg = 0.0;
  auto side = [&](std::span<const double> out, std::span<const int> labels, std::vector<double>& grad) {
    grad.resize(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double g = out[i];
      if (labels[i] > 0) {
        sum_pos += loss_eval(loss, g);
        grad[i] = pi_p * loss_grad(loss, g) / cp;
      } else {
        sum_neg += loss_eval(loss, -g);
        grad[i] = -(pi_n * loss_grad(loss, -g)) / cn;
      }
    }
  };
  side(out_first, labels_first, obj.grad_first);
  side(out_second, labels_second, obj.grad_second);
  obj.l_pos = pi_p * (sum_pos / cp);
  obj.l_neg = pi_n * (sum_neg / cn);
  obj.unbiased = obj.l_pos + obj.l_neg;
  obj.value = obj.unbiased;
  return obj;
}

double TrainingTrace::final_accuracy() const {
  if (epochs.empty()) throw InsufficientDataError("training trace is empty");
  return epochs.back().test_accuracy;
}

std::size_t TrainingTrace::best_epoch() const {
  if (epochs.empty()) throw InsufficientDataError("training trace is empty");
  const auto it = std::max_element(epochs.begin(), epochs.end(), [](const EpochRecord& x, const EpochRecord& y) {
    return x.test_accuracy < y.test_accuracy;
  });
  return it->epoch;
}

EvalResult evaluate(const Model& model, const LabeledPool& test) {
  if (test.size() == 0) throw InsufficientDataError("test pool is empty");
  const auto outputs = model.outputs(test.features);
  std::size_t correct = 0;
  double risk = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const int predicted = outputs[i] > 0.0 ? 1 : -1;
    correct += predicted == test.labels[i] ? 1 : 0;
    risk += loss_eval(LossKind::zero_one, static_cast<double>(test.labels[i]) * outputs[i]);
  }
  const double count = static_cast<double>(outputs.size());
  return {static_cast<double>(correct) / count, risk / count};
}

double accuracy_drop(const TrainingTrace& trace) {
  if (trace.empty()) throw InsufficientDataError("accuracy drop needs at least one epoch");
  double best = 0.0;
  for (const auto& e : trace.epochs) best = std::max(best, e.test_accuracy);
  return best - trace.epochs.back().test_accuracy;
}

TrainResult train_uu(const UnlabeledSets& data, const LabeledPool& test, const TrainConfig& config,
                     const BatchObserver& observer) {
  return train_uu(data, test, config, Model::init(config.arch, derive_seed(config.seed, kInitStream)), observer);
}

TrainResult train_uu(const UnlabeledSets& data, const LabeledPool& test, const TrainConfig& config, Model initial,
                     const BatchObserver& observer) {
  if (config.method.kind() == MethodSpec::Kind::supervised_pn)
    throw ConfigError("supervised_pn needs hidden labels; use train_supervised_reference");
  const RiskCoefficients coeffs = compute_coefficients(data.theta, data.theta_prime, data.pi_p, config.priors);
  ObjectiveFn objective = [&](std::span<const double> first, std::span<const double> second, const BatchPair&) {
    return batch_objective(coeffs, first, second, config.method, config.loss);
  };
  return run_training(data, test, config, std::move(initial), objective, observer);
}

TrainResult train_supervised_reference(const UUDataset& dataset, const TrainConfig& config) {
  return train_supervised_reference(dataset, config,
                                    Model::init(config.arch, derive_seed(config.seed, kInitStream)));
}

TrainResult train_supervised_reference(const UUDataset& dataset, const TrainConfig& config, Model initial) {
  const auto& labels = dataset.hidden_labels();
  const auto& labels_prime = dataset.hidden_labels_prime();
  const double pi_p = dataset.unlabeled().pi_p;
  std::vector<int> l1, l2;
  ObjectiveFn objective = [&](std::span<const double> first, std::span<const double> second, const BatchPair& pair) {
    l1.resize(pair.first.size());
    l2.resize(pair.second.size());
    for (std::size_t i = 0; i < pair.first.size(); ++i) l1[i] = labels[pair.first[i]];
    for (std::size_t j = 0; j < pair.second.size(); ++j) l2[j] = labels_prime[pair.second[j]];
    return supervised_batch_objective(first, l1, second, l2, pi_p, config.loss);
  };
  TrainConfig cfg = config;
  cfg.method = MethodSpec::supervised();
  return run_training(dataset.unlabeled(), dataset.test(), cfg, std::move(initial), objective, {});
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
  out << "epoch,train_risk_uu,train_risk_cc,test_acc,test_risk01,best_acc\n";
  for (const auto& e : trace.epochs) {
    out << e.epoch << ',' << format_real(e.train_risk_uu) << ',' << format_real(e.train_risk_cc) << ','
        << format_real(e.test_accuracy) << ',' << format_real(e.test_risk01) << ',' << format_real(e.best_accuracy)
        << '\n';
  }
}

void write_trace_summary(std::ostream& out, const TrainingTrace& trace) {
  write_kv(out, "epochs", trace.epochs.size());
  if (!trace.empty()) {
    write_kv(out, "final_acc", trace.final_accuracy());
    write_kv(out, "best_acc", trace.epochs.back().best_accuracy);
    write_kv(out, "delta_a", accuracy_drop(trace));
    write_kv(out, "overfit_onset_epoch", trace.best_epoch());
    write_kv(out, "final_train_risk_uu", trace.epochs.back().train_risk_uu);
    write_kv(out, "final_train_risk_cc", trace.epochs.back().train_risk_cc);
  }
  write_kv(out, "first_negative_epoch", trace.first_negative_epoch);
  write_kv(out, "batches_checked", trace.batches_checked);
  write_kv(out, "batch_violations", trace.batch_violations);
}

}  // namespace uucc
