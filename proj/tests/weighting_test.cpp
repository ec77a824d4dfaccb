#include "lupi/weighting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace lupi {
namespace {

TEST(NadarayaWatson, HandComputedEstimate) {
  Matrix x(3, 1);
  x << 0, 1, 2;
  Vector y(3);
  y << 1, 1, -1;
  const Dataset train(x, y);
  Matrix q(1, 1);
  q << 0;
  const ConfidenceEstimate e = nadaraya_watson(train, q, 1.0);
  const double a = std::exp(-0.5);
  const double b = std::exp(-2.0);
  EXPECT_NEAR(e.eta[0], (1.0 + a - b) / (1.0 + a + b), 1e-15);
  EXPECT_FALSE(e.any_underflow);
}

TEST(NadarayaWatson, UnanimousLabelsAndUnderflow) {
  Matrix x(2, 1);
  x << 0, 1;
  const Dataset train(x, Vector::Ones(2));
  Matrix q(2, 1);
  q << 0.5, 1e6;
  const ConfidenceEstimate e = nadaraya_watson(train, q, 0.1);
  EXPECT_EQ(e.eta[0], 1.0);
  EXPECT_TRUE(e.underflow[1]);
  EXPECT_EQ(e.eta[1], 0.0);
  EXPECT_TRUE(e.any_underflow);
  EXPECT_THROW(nadaraya_watson(train, q, 0.0), InvalidInput);
  EXPECT_THROW(nadaraya_watson(train, Matrix::Zero(1, 2), 1.0), InvalidInput);
}

TEST(ProbabilityWeights, Examples) {
  const Vector eta = (Vector(3) << 1.0, 0.0, -0.6).finished();
  const Vector y = (Vector(3) << 1.0, -1.0, 1.0).finished();
  EXPECT_EQ(probability_weights(eta, y, 0.0), Vector::Ones(3));
  const Vector c1 = probability_weights(eta, y, 1.0);
  EXPECT_EQ(c1[0], 1.0);
  EXPECT_EQ(c1[1], 0.5);
  EXPECT_NEAR(c1[2], 0.2, 1e-15);
  EXPECT_EQ(probability_weights(eta, y, 2.0)[1], 0.25);
  EXPECT_THROW(probability_weights(eta, y, -1.0), InvalidInput);
  EXPECT_THROW(probability_weights(eta, Vector::Ones(2), 1.0), InvalidInput);
}

TEST(ProbabilityWeights, DownweightingAndMonotonicity) {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector eta(200), y(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    eta[i] = i < 4 ? (i % 2 == 0 ? 1.0 : 0.0) : unif(rng);
    y[i] = i % 3 == 0 ? -1.0 : 1.0;
  }
  const Vector w = probability_weights(eta, y, 1.0);
  for (Eigen::Index i = 0; i < 200; ++i) EXPECT_EQ(w[i] <= 0.5, y[i] * eta[i] <= 0.0) << i;
  Vector prev = w;
  for (const double tau : {1.5, 2.0, 4.0, 8.0}) {
    const Vector c = probability_weights(eta, y, tau);
    for (Eigen::Index i = 0; i < 200; ++i) {
      if (w[i] == 1.0) {
        EXPECT_EQ(c[i], 1.0);
      } else {
        EXPECT_LE(c[i], prev[i]);
      }
    }
    prev = c;
  }
}

TEST(WeightedRisk, CounterexampleWeighting) {
  // Decision values of the counterexample model f(x) = -2x + 3 on x = 1, 2, 3.
  const Vector f = (Vector(3) << 1.0, -1.0, -3.0).finished();
  const Vector y = (Vector(3) << 1.0, -1.0, 1.0).finished();
  const Vector c = (Vector(3) << 4.0, 6.0, 2.0).finished();
  EXPECT_NEAR(weighted_risk(f, y, c, {}, RiskNormalization::weight_sum), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(weighted_risk(f, y, Vector::Ones(3)), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(weighted_risk(f, y, c / 12.0, {}, RiskNormalization::per_instance), 2.0 / 9.0, 1e-15);
}

TEST(WeightedRisk, UnitWeightsAndZeroLosses) {
  const Vector f = (Vector(2) << 0.5, 2.0).finished();
  const Vector y = Vector::Ones(2);
  EXPECT_DOUBLE_EQ(weighted_risk(f, y, Vector::Ones(2)), 0.25);
  EXPECT_EQ(weighted_risk(Vector::Constant(2, 3.0), y, Vector::Constant(2, 7.0)), 0.0);
  const MarginLoss zero_one = [](double t) { return t <= 0.0 ? 1.0 : 0.0; };
  EXPECT_EQ(weighted_risk(-f, y, Vector::Ones(2), zero_one), 1.0);
  EXPECT_THROW(weighted_risk(f, y, Vector::Zero(2), {}, RiskNormalization::weight_sum), InvalidInput);
}

TEST(WeightedRisk, WeightedZeroOneRiskKeepsBayesThreshold) {
  // P(1|x) = x on [0,1], so the Bayes threshold is 0.5. Each grid point appears
  // once per label with its probability mass folded into the weight.
  const Eigen::Index m = 1000;
  Vector x(2 * m), y(2 * m), eta(2 * m), mass(2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double p = (k + 0.5) / m;
    for (const Eigen::Index i : {2 * k, 2 * k + 1}) {
      x[i] = p;
      eta[i] = 2.0 * p - 1.0;
      y[i] = i == 2 * k ? 1.0 : -1.0;
      mass[i] = y[i] > 0 ? p : 1.0 - p;
    }
  }
  const MarginLoss zero_one = [](double t) { return t <= 0.0 ? 1.0 : 0.0; };
  for (const double tau : {0.0, 1.0, 2.0}) {
    const Vector w = mass.cwiseProduct(probability_weights(eta, y, tau));
    double best = 1e9;
    double best_threshold = -1.0;
    for (int k = 0; k <= 20; ++k) {
      const double threshold = k / 20.0;
      const double risk = weighted_risk((x.array() - threshold).matrix(), y, w, zero_one);
      if (risk < best) {
        best = risk;
        best_threshold = threshold;
      }
    }
    EXPECT_EQ(best_threshold, 0.5) << "tau " << tau;
  }
}

}  // namespace
}  // namespace lupi
