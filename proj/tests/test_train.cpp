#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "uucc/errors.hpp"
#include "uucc/gradcheck.hpp"
#include "uucc/risk.hpp"
#include "uucc/train.hpp"

using namespace uucc;

namespace {

Matrix make_matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values) {
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.flat().begin());
  return m;
}

std::vector<double> params(const Model& m) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.parameter_count(); ++i) out.push_back(m.parameter(i));
  return out;
}

TrainingTrace trace_with(std::initializer_list<double> accuracies) {
  TrainingTrace t;
  std::size_t e = 0;
  double best = 0.0;
  for (double a : accuracies) {
    EpochRecord r;
    r.epoch = ++e;
    r.test_accuracy = a;
    best = std::max(best, a);
    r.best_accuracy = best;
    t.epochs.push_back(r);
  }
  return t;
}

TrainConfig small_config(const MethodSpec& method, std::size_t dim, std::size_t epochs) {
  TrainConfig c;
  c.arch = Architecture::mlp({dim, 8, 1});
  c.method = method;
  c.epochs = epochs;
  c.batch_size = 64;
  c.seed = 17;
  return c;
}

void expect_same_trace(const TrainingTrace& a, const TrainingTrace& b) {
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    EXPECT_EQ(a.epochs[i].train_risk_uu, b.epochs[i].train_risk_uu) << "epoch " << i + 1;
    EXPECT_EQ(a.epochs[i].test_accuracy, b.epochs[i].test_accuracy) << "epoch " << i + 1;
  }
  EXPECT_EQ(a.first_negative_epoch, b.first_negative_epoch);
}

}  // namespace

TEST(Method, Names) {
  EXPECT_EQ(MethodSpec::biased().name(), "biased");
  EXPECT_EQ(MethodSpec::unbiased().name(), "unbiased");
  EXPECT_EQ(MethodSpec::corrected(CorrectionSpec::hard_max()).name(), "corrected_l0");
  EXPECT_EQ(MethodSpec::corrected(CorrectionSpec::leaky(-0.5)).name(), "corrected_l-0.5");
  EXPECT_EQ(MethodSpec::corrected(CorrectionSpec::leaky(-1)).name(), "corrected_l-1");
  EXPECT_TRUE(MethodSpec::biased().correction().is_identity());
}

TEST(BatchObjective, MatchesFullRiskFunctions) {
  const auto k = compute_coefficients(0.7, 0.2, 0.4);
  const std::vector<double> o1 = {0.4, -1.3, 2.2, 0.0}, o2 = {-0.5, 0.9, -2.0};
  const auto parts = uu_risk_parts(k, o1, o2, LossKind::sigmoid);
  const auto un = batch_objective(k, o1, o2, MethodSpec::unbiased(), LossKind::sigmoid);
  EXPECT_NEAR(un.value, uu_unbiased_risk(parts), 1e-15);
  EXPECT_NEAR(un.l_pos, parts.positive_group(), 1e-15);
  EXPECT_NEAR(un.l_neg, parts.negative_group(), 1e-15);
  const auto cc = batch_objective(k, o1, o2, MethodSpec::corrected(CorrectionSpec::leaky(-0.5)), LossKind::sigmoid);
  EXPECT_NEAR(cc.value, uu_corrected_risk(parts, CorrectionSpec::leaky(-0.5)).value, 1e-15);
  const auto bi = batch_objective(k, o1, o2, MethodSpec::biased(), LossKind::sigmoid);
  EXPECT_NEAR(bi.value, uu_biased_risk(o1, o2, LossKind::sigmoid), 1e-15);
  EXPECT_THROW(batch_objective(k, o1, o2, MethodSpec::supervised(), LossKind::sigmoid), ConfigError);
  EXPECT_THROW(batch_objective(k, {}, o2, MethodSpec::unbiased(), LossKind::sigmoid), InsufficientDataError);
}

TEST(BatchObjective, ZeroCoefficientsGiveZeroGradient) {
  const auto k = RiskCoefficients::from_raw(0.0, 0.0, 0.0, 0.0);
  const std::vector<double> o1 = {0.4, -1.3}, o2 = {-0.5, 0.9};
  const auto obj = batch_objective(k, o1, o2, MethodSpec::corrected(CorrectionSpec::leaky(-0.5)), LossKind::logistic);
  for (double g : obj.grad_first) EXPECT_EQ(g, 0.0);
  for (double g : obj.grad_second) EXPECT_EQ(g, 0.0);
}

TEST(Train, HandUnrolledSingleStep) {
  // Two plus two rows, linear model, SGD lr 0.1 without momentum, leaky slope -0.5.
  // Here L+ < 0 and L- > 0, so both branches of the chain rule are used.
  // Reference gradient from 40-digit numeric differentiation of f(L+) + f(L-).
  auto model = Model::init(Architecture::linear(2), 0);
  model.set_layer(0, make_matrix(1, 2, {0.2, 0.1}), std::vector<double>{0.5});
  const Matrix x1 = make_matrix(2, 2, {1.0, 2.0, 1.0, 0.5});
  const Matrix x2 = make_matrix(2, 2, {0.3, -1.0, -2.0, -1.0});
  const auto k = compute_coefficients(0.6, 0.4, 0.5);
  const auto method = MethodSpec::corrected(CorrectionSpec::leaky(-0.5));

  const auto p1 = model.forward(x1);
  const auto p2 = model.forward(x2);
  const auto obj = batch_objective(k, p1.outputs, p2.outputs, method, LossKind::logistic);
  EXPECT_NEAR(obj.l_pos, -0.045238538381870480025, 1e-14);
  EXPECT_NEAR(obj.l_neg, 0.042873358102173074348, 1e-14);
  EXPECT_NEAR(obj.value, 0.065492627293108314361, 1e-14);
  model.backward(p1.cache, obj.grad_first);
  model.backward(p2.cache, obj.grad_second);
  Optimizer opt(SgdMomentumConfig{0.1, 0.0, 0.0}, model);
  opt.step(model);
  EXPECT_NEAR(model.parameter(0), 0.28574579237335466783, 1e-14);
  EXPECT_NEAR(model.parameter(1), 0.22168164866223268325, 1e-14);
  EXPECT_NEAR(model.parameter(2), 0.48533480004360118488, 1e-14);
}

TEST(Train, ZeroEpochsReturnsTheInitialModel) {
  const auto pool = gaussian_pool(3, 2.0, 200, 1);
  const auto ds = make_uu_datasets(pool, 0.7, 0.3, 0.5, 100, 100, 0.2, 2);
  const auto cfg = small_config(MethodSpec::unbiased(), 3, 0);
  const auto init = Model::init(cfg.arch, 99);
  const auto result = train_uu(ds.unlabeled(), ds.test(), cfg, init);
  EXPECT_TRUE(result.trace.empty());
  EXPECT_EQ(params(result.model), params(init));
  EXPECT_THROW(accuracy_drop(result.trace), InsufficientDataError);
}

TEST(Train, SupervisedReductionIsStepForStep) {
  const auto pool = gaussian_pool(2, 2.0, 300, 3);
  const auto ds = make_uu_datasets(pool, 1.0, 0.0, 0.5, 200, 150, 0.2, 4);
  auto cfg = small_config(MethodSpec::unbiased(), 2, 5);
  cfg.priors.allow_boundary = true;
  const auto uu = train_uu(ds.unlabeled(), ds.test(), cfg);
  const auto pn = train_supervised_reference(ds, cfg);
  expect_same_trace(uu.trace, pn.trace);
  const auto a = params(uu.model), b = params(pn.model);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Train, SeparableCleanSplitReachesHighAccuracy) {
  const auto pool = gaussian_pool(2, 8.0, 400, 5);
  const auto ds = make_uu_datasets(pool, 1.0, 0.0, 0.5, 250, 250, 0.25, 6);
  TrainConfig cfg;
  cfg.arch = Architecture::linear(2);
  cfg.optimizer = SgdMomentumConfig{0.05, 0.9, 0.0};
  cfg.epochs = 50;
  cfg.batch_size = 100;
  cfg.priors.allow_boundary = true;
  const auto uu = train_uu(ds.unlabeled(), ds.test(), cfg);
  const auto pn = train_supervised_reference(ds, cfg);
  EXPECT_GT(uu.trace.final_accuracy(), 0.95);
  EXPECT_NEAR(uu.trace.final_accuracy(), pn.trace.final_accuracy(), 0.02);
}

TEST(Train, IdentityCorrectionEqualsUnbiased) {
  const auto pool = gaussian_pool(3, 1.0, 300, 7);
  const auto ds = make_uu_datasets(pool, 0.8, 0.3, 0.5, 150, 120, 0.2, 8);
  const auto a = train_uu(ds.unlabeled(), ds.test(), small_config(MethodSpec::unbiased(), 3, 6));
  const auto b =
      train_uu(ds.unlabeled(), ds.test(), small_config(MethodSpec::corrected(CorrectionSpec::identity()), 3, 6));
  expect_same_trace(a.trace, b.trace);
  EXPECT_EQ(params(a.model), params(b.model));
}

TEST(Train, DeterministicForFixedSeed) {
  const auto pool = gaussian_pool(3, 1.0, 300, 7);
  const auto ds = make_uu_datasets(pool, 0.8, 0.3, 0.5, 150, 120, 0.2, 8);
  const auto cfg = small_config(MethodSpec::corrected(CorrectionSpec::leaky(-0.5)), 3, 4);
  const auto a = train_uu(ds.unlabeled(), ds.test(), cfg);
  const auto b = train_uu(ds.unlabeled(), ds.test(), cfg);
  expect_same_trace(a.trace, b.trace);
  EXPECT_EQ(params(a.model), params(b.model));
}

TEST(Train, CorrectedBatchesDominateAndStayNonNegative) {
  const auto pool = gaussian_pool(4, 0.5, 600, 9);
  const auto ds = make_uu_datasets(pool, 0.6, 0.4, 0.5, 400, 400, 0.2, 10);
  for (double lambda : {0.0, -0.5, -1.0}) {
    const auto spec = lambda == 0.0 ? CorrectionSpec::hard_max() : CorrectionSpec::leaky(lambda);
    auto cfg = small_config(MethodSpec::corrected(spec), 4, 30);
    cfg.arch = Architecture::mlp({4, 16, 16, 1});
    cfg.optimizer = AdamConfig{1e-2};
    std::size_t seen = 0, negative_groups = 0;
    const auto result = train_uu(ds.unlabeled(), ds.test(), cfg, [&](const BatchRecord& r) {
      ++seen;
      if (r.l_pos < 0 || r.l_neg < 0) ++negative_groups;
      EXPECT_GE(r.value, 0.0);
      EXPECT_GE(r.value, r.unbiased);
      if (r.l_pos >= 0 && r.l_neg >= 0) EXPECT_EQ(r.value, r.unbiased);
    });
    EXPECT_EQ(result.trace.batch_violations, 0u);
    EXPECT_EQ(result.trace.batches_checked, seen);
    EXPECT_GT(negative_groups, 0u) << "fixture should reach the negative branch";
    for (const auto& e : result.trace.epochs) EXPECT_GE(e.train_risk_cc, 0.0);
  }
}

TEST(Train, RejectsSupervisedAndMismatchedShapes) {
  const auto pool = gaussian_pool(3, 1.0, 100, 7);
  const auto ds = make_uu_datasets(pool, 0.8, 0.3, 0.5, 50, 50, 0.2, 8);
  EXPECT_THROW(train_uu(ds.unlabeled(), ds.test(), small_config(MethodSpec::supervised(), 3, 1)), ConfigError);
  EXPECT_THROW(train_uu(ds.unlabeled(), ds.test(), small_config(MethodSpec::unbiased(), 4, 1)), ShapeError);
  auto cfg = small_config(MethodSpec::unbiased(), 3, 1);
  cfg.loss = LossKind::zero_one;
  EXPECT_THROW(train_uu(ds.unlabeled(), ds.test(), cfg), ConfigError);
}

TEST(Train, DivergenceIsATrainingFault) {
  const auto pool = gaussian_pool(3, 1.0, 300, 7);
  const auto ds = make_uu_datasets(pool, 0.6, 0.4, 0.5, 200, 200, 0.2, 8);
  auto cfg = small_config(MethodSpec::unbiased(), 3, 200);
  cfg.optimizer = SgdMomentumConfig{1e6, 0.9, 0.0};
  EXPECT_THROW(train_uu(ds.unlabeled(), ds.test(), cfg), TrainingFault);
}

TEST(Evaluate, HandCounted) {
  auto model = Model::init(Architecture::linear(1), 0);
  model.set_layer(0, make_matrix(1, 1, {1.0}), std::vector<double>{0.0});
  LabeledPool test;
  test.features = make_matrix(4, 1, {1.0, 2.0, -1.0, -3.0});
  test.labels = {1, 1, -1, 1};
  const auto r = evaluate(model, test);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(r.zero_one_risk, 0.25);

  test.labels = {1, 1, -1, -1};
  EXPECT_DOUBLE_EQ(evaluate(model, test).accuracy, 1.0);
  model.set_layer(0, make_matrix(1, 1, {-1.0}), std::vector<double>{0.0});
  const auto flipped = evaluate(model, test);
  EXPECT_DOUBLE_EQ(flipped.accuracy, 0.0);
  EXPECT_DOUBLE_EQ(flipped.zero_one_risk, 1.0);
  EXPECT_THROW(evaluate(model, LabeledPool{Matrix(0, 1), {}, ""}), InsufficientDataError);
}

TEST(Evaluate, AccuracyDrop) {
  EXPECT_NEAR(accuracy_drop(trace_with({0.6, 0.9, 0.7})), 0.2, 1e-15);
  EXPECT_EQ(accuracy_drop(trace_with({0.5, 0.6, 0.8})), 0.0);
  EXPECT_EQ(accuracy_drop(trace_with({0.4})), 0.0);
  EXPECT_EQ(trace_with({0.6, 0.9, 0.7}).best_epoch(), 2u);
}

TEST(Trace, CsvHeaderAndPrecision) {
  auto t = trace_with({0.123456789012345, 0.5});
  std::ostringstream out;
  write_trace_csv(out, t);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "epoch,train_risk_uu,train_risk_cc,test_acc,test_risk01,best_acc");
  EXPECT_NE(s.find("0.123456789012345"), std::string::npos);
  std::ostringstream summary;
  write_trace_summary(summary, t);
  for (const char* key : {"final_acc=", "delta_a=", "first_negative_epoch=none"})
    EXPECT_NE(summary.str().find(key), std::string::npos) << key;
}

TEST(GradCheck, LinearUnbiased) {
  const auto model = Model::init(Architecture::linear(5), 3);
  const auto k = compute_coefficients(0.6, 0.4, 0.5);
  const auto fx = make_branch_fixture(model, k, LossKind::logistic, 8, FixtureBranch::positive, 4);
  const auto r = grad_check(model, MethodSpec::unbiased(), LossKind::logistic, fx, 1e-5);
  EXPECT_LT(r.max_relative_error, 1e-5);
  EXPECT_EQ(r.checked, model.parameter_count());
}

TEST(GradCheck, NegativeBranchOfLeakyCorrection) {
  const auto model = Model::init(Architecture::mlp({4, 8, 1}), 5);
  const auto k = compute_coefficients(0.6, 0.4, 0.5);
  const auto fx = make_branch_fixture(model, k, LossKind::logistic, 8, FixtureBranch::negative, 6);
  const auto r = grad_check(model, MethodSpec::corrected(CorrectionSpec::leaky(-0.5)), LossKind::logistic, fx, 1e-5);
  EXPECT_LT(r.l_pos, 0.0);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_GT(r.checked, 0u);
}

TEST(GradCheck, DetectsAWrongGradient) {
  // With the wrong slope sign the chain rule is wrong on the negative branch.
  const auto model = Model::init(Architecture::linear(3), 5);
  const auto k = compute_coefficients(0.6, 0.4, 0.5);
  const auto fx = make_branch_fixture(model, k, LossKind::logistic, 8, FixtureBranch::negative, 6);
  const auto good = batch_objective(k, model.outputs(fx.first), model.outputs(fx.second),
                                    MethodSpec::corrected(CorrectionSpec::leaky(-1.0)), LossKind::logistic);
  const auto un = batch_objective(k, model.outputs(fx.first), model.outputs(fx.second), MethodSpec::unbiased(),
                                  LossKind::logistic);
  ASSERT_LT(good.l_pos, 0.0);
  // On the negative branch with slope -1 the output gradients are exactly negated.
  for (std::size_t i = 0; i < good.grad_first.size(); ++i) EXPECT_NEAR(good.grad_first[i], -un.grad_first[i], 1e-15);
}

TEST(GradCheck, FixtureBranches) {
  const auto k = compute_coefficients(0.6, 0.4, 0.5);
  const auto swapped = compute_coefficients(0.4, 0.6, 0.5);
  for (LossKind loss : {LossKind::logistic, LossKind::sigmoid}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto model = Model::init(Architecture::mlp({10, 32, 32, 1}), s);
      for (const auto* coeffs : {&k, &swapped}) {
        SCOPED_TRACE(::testing::Message() << "seed " << s << " swapped " << coeffs->swapped << " loss "
                                          << static_cast<int>(loss));
        GradCheckFixture neg;
        ASSERT_NO_THROW(neg = make_branch_fixture(model, *coeffs, loss, 8, FixtureBranch::negative, s));
        const auto o = batch_objective(*coeffs, model.outputs(neg.first), model.outputs(neg.second),
                                       MethodSpec::unbiased(), loss);
        EXPECT_LT(o.l_pos, 0.0);
        EXPECT_LT(o.l_neg, 0.0);
        GradCheckFixture pos;
        ASSERT_NO_THROW(pos = make_branch_fixture(model, *coeffs, loss, 8, FixtureBranch::positive, s));
        const auto p = batch_objective(*coeffs, model.outputs(pos.first), model.outputs(pos.second),
                                       MethodSpec::unbiased(), loss);
        EXPECT_GT(p.l_pos, 0.0);
        EXPECT_GT(p.l_neg, 0.0);
      }
    }
  }
}

TEST(GradCheck, ConstantModelCannotReachTheNegativeBranch) {
  auto model = Model::init(Architecture::linear(2), 0);
  model.set_layer(0, Matrix(1, 2), std::vector<double>{0.0});
  EXPECT_THROW(make_branch_fixture(model, compute_coefficients(0.6, 0.4, 0.5), LossKind::logistic, 4,
                                   FixtureBranch::negative, 1),
               ContractViolation);
}
