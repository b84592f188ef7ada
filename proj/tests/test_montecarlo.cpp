#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "uucc/errors.hpp"
#include "uucc/montecarlo.hpp"

using namespace uucc;

namespace {

// R(g) for g = x_1, class means +-2, pi_p = 1/2, by 60-digit quadrature.
constexpr double kLogisticTruth = 0.18273697206645164081;
constexpr double kSigmoidTruth = 0.15546251853012348299;

ExperimentConfig small_mc(LossKind loss, std::uint64_t seed) {
  ExperimentConfig c;
  c.dim = 1;
  c.separation = 4.0;
  c.loss = loss;
  c.seeds = {seed};
  c.trials = 400;
  c.mc_sizes = {50, 200};
  c.true_risk_samples = 100000;
  return c;
}

std::string csv_of(const McReport& r) {
  std::ostringstream out;
  write_mc_csv(out, r);
  return out.str();
}

}  // namespace

TEST(FixedClassifier, Outputs) {
  FixedClassifier g{{2.0, -1.0}, 0.5};
  Matrix x(2, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 3.0;
  x(1, 0) = -1.0;
  x(1, 1) = 0.0;
  const auto out = g.outputs(x);
  EXPECT_DOUBLE_EQ(out[0], -0.5);
  EXPECT_DOUBLE_EQ(out[1], -1.5);
  const auto bayes = bayes_threshold(3);
  EXPECT_EQ(bayes.weight, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(bayes.bias, 0.0);
  EXPECT_THROW(g.outputs(Matrix(1, 3)), ShapeError);
}

TEST(FixedClassifier, CorrectionForLambda) {
  EXPECT_EQ(correction_for_lambda(0.0), CorrectionSpec::hard_max());
  EXPECT_EQ(correction_for_lambda(-0.5), CorrectionSpec::leaky(-0.5));
}

TEST(TrueRisk, MatchesQuadrature) {
  const GaussianSource src{1, 4.0};
  const auto g = bayes_threshold(1);
  const auto log = labeled_true_risk(src, g, 0.5, LossKind::logistic, 400000, 11);
  EXPECT_NEAR(log.risk, kLogisticTruth, 4.0 * log.std_error);
  EXPECT_LT(log.std_error, 1e-3);
  EXPECT_NEAR(log.alpha + log.beta, log.risk, 1e-12);
  const auto sig = labeled_true_risk(src, g, 0.5, LossKind::sigmoid, 400000, 12);
  EXPECT_NEAR(sig.risk, kSigmoidTruth, 4.0 * sig.std_error);
  EXPECT_EQ(sig.samples, 400000u);
  EXPECT_THROW(labeled_true_risk(src, g, 0.5, LossKind::logistic, 1, 0), ConfigError);
}

TEST(EstimatorMc, UnbiasedAndCorrectedWithoutViolations) {
  for (LossKind loss : {LossKind::logistic, LossKind::sigmoid}) {
    const auto report = run_estimator_mc(small_mc(loss, 3));
    EXPECT_EQ(report.trials, 400u);
    ASSERT_EQ(report.sizes.size(), 2u);
    EXPECT_EQ(report.total_violations(), 0u);
    for (const auto& s : report.sizes) {
      EXPECT_EQ(s.n, s.n_prime);
      EXPECT_LT(std::abs(s.z_uu), 4.0);
      EXPECT_LE(s.negative_risk_resamples, s.negative_resamples);
      ASSERT_EQ(s.corrected.size(), 3u);
      for (const auto& c : s.corrected) {
        EXPECT_GE(c.bias, 0.0);
        EXPECT_GE(c.mean, s.mean_uu);
        EXPECT_GE(c.bias_upper, 0.0);
      }
      EXPECT_LE(s.corrected[0].bias, s.corrected[0].bias_upper + 3.0 * s.corrected[0].bias_std_error);
    }
  }
}

TEST(EstimatorMc, SmallSetsGoNegative) {
  auto cfg = small_mc(LossKind::logistic, 4);
  cfg.theta = 0.55;
  cfg.theta_prime = 0.45;
  cfg.mc_sizes = {20};
  const auto report = run_estimator_mc(cfg);
  EXPECT_GT(report.sizes[0].negative_resamples, 0u);
  EXPECT_GT(report.sizes[0].corrected[0].bias, 0.0);
  EXPECT_EQ(report.total_violations(), 0u);
}

TEST(EstimatorMc, DeterministicPerSeed) {
  const auto a = csv_of(run_estimator_mc(small_mc(LossKind::sigmoid, 5)));
  const auto b = csv_of(run_estimator_mc(small_mc(LossKind::sigmoid, 5)));
  const auto c = csv_of(run_estimator_mc(small_mc(LossKind::sigmoid, 6)));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "n,n_prime,lambda,true_risk,mean_uu,std_error_uu,mean_cc,bias,bias_std_error,bias_raw,bias_upper,"
            "violations");
}

TEST(EstimatorMc, RequiresSyntheticSource) {
  auto cfg = small_mc(LossKind::logistic, 1);
  cfg.source = "idx";
  EXPECT_THROW(run_estimator_mc(cfg), UsageError);
}
