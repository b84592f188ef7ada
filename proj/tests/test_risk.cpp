#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "uucc/coefficients.hpp"
#include "uucc/correction.hpp"
#include "uucc/errors.hpp"
#include "uucc/risk.hpp"
#include "uucc/rng.hpp"

using namespace uucc;

namespace {

UURiskParts make_parts(double A, double B, double C, double D) {
  UURiskParts p;
  p.A = A;
  p.B = B;
  p.C = C;
  p.D = D;
  return p;
}

}  // namespace

TEST(Coefficients, SupervisedReduction) {
  PriorOptions opts;
  opts.allow_boundary = true;
  const auto k = compute_coefficients(1.0, 0.0, 0.5, opts);
  EXPECT_DOUBLE_EQ(k.a, 0.5);
  EXPECT_DOUBLE_EQ(k.b, 0.0);
  EXPECT_DOUBLE_EQ(k.c, 0.0);
  EXPECT_DOUBLE_EQ(k.d, 0.5);
  EXPECT_THROW(compute_coefficients(1.0, 0.0, 0.5), ConfigError);
}

TEST(Coefficients, HandComputedValues) {
  const auto k = compute_coefficients(0.6, 0.4, 0.5);
  EXPECT_NEAR(k.a, 1.5, 1e-12);
  EXPECT_NEAR(k.b, 1.0, 1e-12);
  EXPECT_NEAR(k.c, 1.0, 1e-12);
  EXPECT_NEAR(k.d, 1.5, 1e-12);

  // Exact fractions: 8/15, 1/5, 2/15, 4/5.
  const auto m = compute_coefficients(0.8, 0.2, 0.4);
  EXPECT_NEAR(m.a, 8.0 / 15.0, 1e-12);
  EXPECT_NEAR(m.b, 0.2, 1e-12);
  EXPECT_NEAR(m.c, 2.0 / 15.0, 1e-12);
  EXPECT_NEAR(m.d, 0.8, 1e-12);
  EXPECT_NEAR(m.a - m.c, 0.4, 1e-12);
  EXPECT_NEAR(m.d - m.b, 0.6, 1e-12);
}

TEST(Coefficients, SwapsWhenSecondPriorIsLarger) {
  const auto k = compute_coefficients(0.3, 0.7, 0.5);
  EXPECT_TRUE(k.swapped);
  EXPECT_DOUBLE_EQ(k.theta, 0.7);
  EXPECT_DOUBLE_EQ(k.theta_prime, 0.3);
  const auto ref = compute_coefficients(0.7, 0.3, 0.5);
  EXPECT_FALSE(ref.swapped);
  EXPECT_EQ(k.a, ref.a);
  EXPECT_EQ(k.d, ref.d);
}

TEST(Coefficients, ErrorPaths) {
  EXPECT_THROW(compute_coefficients(0.5, 0.5, 0.5), DegeneratePriorsError);
  EXPECT_THROW(compute_coefficients(0.5, 0.5 + 1e-9, 0.5), DegeneratePriorsError);
  EXPECT_THROW(compute_coefficients(1.2, 0.4, 0.5), ConfigError);
  EXPECT_THROW(compute_coefficients(0.6, 0.4, 0.0), ConfigError);
  EXPECT_THROW(compute_coefficients(0.6, std::nan(""), 0.5), ConfigError);
}

TEST(Coefficients, IdentitiesOnRandomPriors) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double t = rng.uniform(0.01, 0.99), tp = rng.uniform(0.01, 0.99), p = rng.uniform(0.01, 0.99);
    if (std::fabs(t - tp) < 1e-3) continue;
    const auto k = compute_coefficients(t, tp, p);
    EXPECT_NEAR(k.a - k.c, p, 1e-12);
    EXPECT_NEAR(k.d - k.b, 1 - p, 1e-12);
    EXPECT_GE(k.a, 0.0);
    EXPECT_GE(k.b, 0.0);
    EXPECT_GE(k.c, 0.0);
    EXPECT_GE(k.d, 0.0);
  }
}

TEST(Risk, EmpiricalPnRisk) {
  const std::vector<double> pos = {0.2, 0.4}, neg = {0.6};
  EXPECT_NEAR(empirical_pn_risk(pos, neg, 0.5), 0.45, 1e-15);
  const std::vector<double> ln2a(3, std::log(2.0)), ln2b(5, std::log(2.0));
  EXPECT_NEAR(empirical_pn_risk(ln2a, ln2b, 0.3), std::log(2.0), 1e-15);
  EXPECT_EQ(empirical_pn_risk(pos, neg, 1.0), 0.30000000000000004);
  EXPECT_THROW(empirical_pn_risk({}, neg, 0.5), InsufficientDataError);
}

TEST(Risk, ZeroClassifierCollapsesToLn2) {
  const std::vector<double> zeros(7, 0.0), zeros2(4, 0.0);
  for (auto [t, tp, p] : {std::tuple{0.6, 0.4, 0.5}, std::tuple{0.9, 0.15, 0.3}, std::tuple{0.2, 0.7, 0.8}}) {
    const auto parts = uu_risk_parts(compute_coefficients(t, tp, p), zeros, zeros2, LossKind::logistic);
    EXPECT_NEAR(uu_unbiased_risk(parts), std::log(2.0), 1e-12);
  }
}

TEST(Risk, ThreePlusThreeFixture) {
  // Reference values evaluated in 50-digit arithmetic.
  const std::vector<double> out = {0.5, -1.0, 2.0}, out_prime = {-0.3, 1.2, 0.0};
  const auto parts = uu_risk_parts(compute_coefficients(0.6, 0.4, 0.5), out, out_prime, LossKind::logistic);
  EXPECT_NEAR(parts.A, 0.95713334137065100568, 1e-12);
  EXPECT_NEAR(parts.B, 1.1380888942471006705, 1e-12);
  EXPECT_NEAR(parts.C, 0.60359496412216787247, 1e-12);
  EXPECT_NEAR(parts.D, 1.3553924461832518087, 1e-12);
  EXPECT_NEAR(uu_unbiased_risk(parts), 0.57084192918463427146, 1e-12);
}

TEST(Risk, SwappedSetsGiveTheSameRisk) {
  const std::vector<double> out = {0.5, -1.0, 2.0}, out_prime = {-0.3, 1.2, 0.0};
  const auto direct = uu_risk_parts(compute_coefficients(0.6, 0.4, 0.5), out, out_prime, LossKind::logistic);
  const auto swapped = uu_risk_parts(compute_coefficients(0.4, 0.6, 0.5), out_prime, out, LossKind::logistic);
  EXPECT_EQ(uu_unbiased_risk(direct), uu_unbiased_risk(swapped));
}

TEST(Risk, UnbiasedCanBeNegative) {
  EXPECT_NEAR(uu_unbiased_risk(make_parts(0.2, 0.1, 0.5, 0.3)), -0.1, 1e-15);
  EXPECT_EQ(uu_unbiased_risk(make_parts(0.3, 0.7, 0.3, 0.7)), 0.0);
}

TEST(Risk, CorrectedExamples) {
  const auto parts = make_parts(0.2, 0.1, 0.5, 0.3);
  EXPECT_NEAR(uu_corrected_risk(parts, CorrectionSpec::hard_max()).value, 0.2, 1e-15);
  EXPECT_NEAR(uu_corrected_risk(parts, CorrectionSpec::leaky(-1.0)).value, 0.5, 1e-15);
  EXPECT_NEAR(uu_corrected_risk(parts, CorrectionSpec::leaky(-0.5)).value, 0.35, 1e-15);
  EXPECT_EQ(uu_corrected_risk(parts, CorrectionSpec::identity()).value, uu_unbiased_risk(parts));
  const auto nonneg = make_parts(0.7, 0.1, 0.5, 0.3);
  EXPECT_EQ(uu_corrected_risk(nonneg, CorrectionSpec::leaky(-0.5)).value, uu_unbiased_risk(nonneg));
}

TEST(Risk, CorrectedDominatesOnRandomParts) {
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    const auto parts = make_parts(rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2));
    const double uu = uu_unbiased_risk(parts);
    for (double lambda : {0.0, -0.5, -1.0}) {
      const auto spec = lambda == 0.0 ? CorrectionSpec::hard_max() : CorrectionSpec::leaky(lambda);
      const double cc = uu_corrected_risk(parts, spec).value;
      EXPECT_GE(cc, 0.0);
      EXPECT_GE(cc, uu);
      if (parts.positive_group() >= 0 && parts.negative_group() >= 0) EXPECT_EQ(cc, uu);
    }
  }
}

TEST(Risk, BiasedRisk) {
  const std::vector<double> zeros(3, 0.0);
  EXPECT_NEAR(uu_biased_risk(zeros, zeros, LossKind::logistic), std::log(2.0), 1e-15);
  const std::vector<double> out = {0.3, -1.2, 2.5}, neg_out = {-0.3, 1.2, -2.5};
  double mean = 0.0;
  for (double v : out) mean += loss_eval(LossKind::logistic, v) / 3.0;
  EXPECT_NEAR(uu_biased_risk(out, neg_out, LossKind::logistic), mean, 1e-15);
  EXPECT_NEAR(uu_biased_risk(std::vector<double>{0.7, -0.2}, std::vector<double>{0.4, -1.5}, LossKind::logistic),
              0.57893836216243869151, 1e-12);
  EXPECT_THROW(uu_biased_risk({}, zeros, LossKind::logistic), InsufficientDataError);
}

TEST(Risk, BalancedError) {
  const std::vector<int> y = {1, 1, 1, 1, -1, -1};
  EXPECT_EQ(ber_zero_one(y, y), 0.0);
  EXPECT_EQ(ber_zero_one(y, std::vector<int>(6, 1)), 0.5);
  EXPECT_EQ(ber_zero_one(std::vector<int>{1, -1}, std::vector<int>{1, 1}), 0.5);
  EXPECT_NEAR(ber_zero_one(y, std::vector<int>{1, 1, 1, -1, 1, -1}), 0.375, 1e-15);
  EXPECT_THROW(ber_zero_one(std::vector<int>{1, 1}, std::vector<int>{1, -1}), UndefinedMetricError);
}

TEST(Risk, EmptyBatchIsRejected) {
  const std::vector<double> some = {0.1};
  EXPECT_THROW(uu_risk_parts(compute_coefficients(0.6, 0.4, 0.5), {}, some, LossKind::logistic),
               InsufficientDataError);
}
