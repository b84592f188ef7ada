#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "uucc/correction.hpp"
#include "uucc/errors.hpp"
#include "uucc/loss.hpp"

using namespace uucc;

TEST(Loss, SymmetricPointValues) {
  EXPECT_NEAR(loss_eval(LossKind::logistic, 0.0), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(loss_eval(LossKind::sigmoid, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(loss_eval(LossKind::zero_one, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(loss_eval(LossKind::zero_one, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(loss_eval(LossKind::zero_one, -0.3), 1.0);
}

TEST(Loss, LogisticAsymptoticsWithoutOverflow) {
  // ln(1 + e^-1000) is ~1e-435; ln(1 + e^1000) is 1000 + ~1e-435.
  const double big = loss_eval(LossKind::logistic, -1000.0);
  const double tiny = loss_eval(LossKind::logistic, 1000.0);
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_DOUBLE_EQ(big, 1000.0);
  EXPECT_GE(tiny, 0.0);
  EXPECT_LT(tiny, 1e-300);
  EXPECT_DOUBLE_EQ(loss_eval(LossKind::sigmoid, 1000.0), 0.0);
  EXPECT_DOUBLE_EQ(loss_eval(LossKind::sigmoid, -1000.0), 1.0);
}

TEST(Loss, GradientsAtZero) {
  EXPECT_DOUBLE_EQ(loss_grad(LossKind::logistic, 0.0), -0.5);
  EXPECT_DOUBLE_EQ(loss_grad(LossKind::sigmoid, 0.0), -0.25);
}

TEST(Loss, GradientMatchesCentralDifferences) {
  const double h = 1e-6;
  for (LossKind kind : {LossKind::logistic, LossKind::sigmoid}) {
    for (double z : {-2.0, -0.3, 1.7}) {
      const double numeric = (loss_eval(kind, z + h) - loss_eval(kind, z - h)) / (2 * h);
      const double analytic = loss_grad(kind, z);
      EXPECT_LT(std::fabs(numeric - analytic) / std::fabs(analytic), 1e-6) << to_string(kind) << " z=" << z;
    }
  }
}

TEST(Loss, SymmetryCondition) {
  // logistic: l(z) - l(-z) = -z; sigmoid: l(z) + l(-z) = 1.
  for (double z : {-7.5, -1.0, 0.0, 0.25, 3.0, 40.0}) {
    EXPECT_NEAR(loss_eval(LossKind::logistic, z) - loss_eval(LossKind::logistic, -z), -z, 1e-12);
    EXPECT_NEAR(loss_eval(LossKind::sigmoid, z) + loss_eval(LossKind::sigmoid, -z), 1.0, 1e-15);
  }
}

TEST(Loss, ErrorPaths) {
  EXPECT_THROW(loss_eval(LossKind::logistic, std::numeric_limits<double>::quiet_NaN()), InputDomainError);
  EXPECT_THROW(loss_eval(LossKind::sigmoid, std::numeric_limits<double>::infinity()), InputDomainError);
  EXPECT_THROW(loss_grad(LossKind::zero_one, 0.5), UnsupportedOperationError);
  EXPECT_FALSE(is_differentiable(LossKind::zero_one));
  EXPECT_THROW(parse_loss_kind("hinge"), ConfigError);
  EXPECT_EQ(parse_loss_kind("sig"), LossKind::sigmoid);
  EXPECT_EQ(parse_loss_kind("logistic"), LossKind::logistic);
  EXPECT_DOUBLE_EQ(loss_lipschitz(LossKind::logistic), 1.0);
  EXPECT_DOUBLE_EQ(loss_lipschitz(LossKind::sigmoid), 0.25);
}

TEST(Correction, ApplyExamples) {
  EXPECT_DOUBLE_EQ(correction_apply(CorrectionSpec::leaky(-1.0), -2.0), 2.0);
  EXPECT_DOUBLE_EQ(correction_apply(CorrectionSpec::hard_max(), -2.0), 0.0);
  EXPECT_DOUBLE_EQ(correction_apply(CorrectionSpec::hard_max(), 3.0), 3.0);
  EXPECT_NEAR(correction_apply(CorrectionSpec::leaky(-0.5), -0.3), 0.15, 1e-16);
  EXPECT_DOUBLE_EQ(correction_apply(CorrectionSpec::identity(), -0.3), -0.3);
}

TEST(Correction, SubgradientExamples) {
  EXPECT_DOUBLE_EQ(correction_subgrad(CorrectionSpec::leaky(-1.0), -5.0), -1.0);
  EXPECT_DOUBLE_EQ(correction_subgrad(CorrectionSpec::hard_max(), 2.0), 1.0);
  EXPECT_DOUBLE_EQ(correction_subgrad(CorrectionSpec::leaky(-0.5), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(correction_subgrad(CorrectionSpec::hard_max(), -1.0), 0.0);
}

TEST(Correction, RejectsPositiveSlope) {
  EXPECT_THROW(CorrectionSpec::leaky(0.5), ConfigError);
  EXPECT_THROW(CorrectionSpec::leaky(std::numeric_limits<double>::quiet_NaN()), ConfigError);
  EXPECT_NO_THROW(CorrectionSpec::leaky(0.0));
}

TEST(Correction, ConsistencyProperties) {
  // Identity on [0, inf), non-negative everywhere, and Lipschitz with max(1, |lambda|).
  for (double lambda : {0.0, -0.25, -0.5, -1.0, -3.0}) {
    const CorrectionSpec f = lambda == 0.0 ? CorrectionSpec::hard_max() : CorrectionSpec::leaky(lambda);
    EXPECT_DOUBLE_EQ(f.lipschitz(), std::max(1.0, -lambda));
    for (double x = -5.0; x <= 5.0; x += 0.125) {
      const double y = correction_apply(f, x);
      EXPECT_GE(y, 0.0);
      EXPECT_GE(y, x);
      if (x >= 0.0) EXPECT_EQ(y, x);
      const double y2 = correction_apply(f, x + 0.125);
      EXPECT_LE(std::fabs(y2 - y), f.lipschitz() * 0.125 + 1e-15);
    }
  }
}
