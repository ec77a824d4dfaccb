#include "lupi/equivalence.hpp"
#include "lupi/kkt.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace lupi {
namespace {

WsvmModel counterexample_model() {
  Matrix x(3, 1);
  x << 1, 2, 3;
  Vector y(3);
  y << 1, -1, 1;
  Vector c(3);
  c << 4, 6, 2;
  return solve_wsvm({x, y}, KernelSpec::linear(), c);
}

WsvmModel bound_constrained_pair() {
  Matrix x(2, 1);
  x << -1, 1;
  Vector y(2);
  y << -1, 1;
  return solve_wsvm({x, y}, KernelSpec::linear(), Vector::Constant(2, 0.3));
}

TEST(Kkt, CounterexamplePasses) {
  const KktReport r = check_wsvm_kkt(counterexample_model(), 1e-6);
  EXPECT_TRUE(r.pass) << r.to_text();
  EXPECT_LE(r.max_violation, 1e-6);
  EXPECT_LE(r.gap, 1e-6);
  for (const KktResidual& res : r.residuals) EXPECT_GE(res.value, 0.0) << res.name;
}

TEST(Kkt, PerturbedAlphaFails) {
  WsvmModel m = counterexample_model();
  m.alpha[0] += 0.1;
  const KktReport r = check_wsvm_kkt(m, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.stationarity, 0.0);
  EXPECT_GT(r.residual("expansion"), 0.0);
  EXPECT_GT(r.residual("label_balance"), 0.0);
  EXPECT_GT(r.residual("weight_split"), 0.0);
}

TEST(Kkt, SinglePointWithZeroWeightPassesTrivially) {
  WsvmModel m;
  m.train_x = Matrix::Zero(1, 1);
  m.y = Vector::Ones(1);
  m.c = Vector::Zero(1);
  m.alpha = Vector::Zero(1);
  m.beta = Vector::Zero(1);
  m.b = 1.0;
  m.decision = Vector::Ones(1);
  m.xi = Vector::Zero(1);
  m.h = Vector::Zero(1);
  const KktReport r = check_wsvm_kkt(m, 1e-12);
  EXPECT_TRUE(r.pass);
  for (const KktResidual& res : r.residuals) EXPECT_EQ(res.value, 0.0) << res.name;
}

TEST(Kkt, ReportAccessorsAndText) {
  const KktReport r = check_wsvm_kkt(counterexample_model(), 1e-6);
  EXPECT_THROW(r.residual("no_such_residual"), InvalidInput);
  const std::string text = r.to_text();
  EXPECT_NE(text.find("pass=true"), std::string::npos);
  EXPECT_NE(text.find("residual.margin_complementarity="), std::string::npos);
}

TEST(Kkt, PassImpliesSmallGap) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset data = testing::random_dataset(rng, 15, 2);
    const WsvmModel m = solve_wsvm(data, testing::random_kernel(rng), testing::random_weights(rng, 15));
    const double tol = 1e-6;
    const KktReport r = check_wsvm_kkt(m, tol);
    ASSERT_TRUE(r.pass) << r.to_text();
    EXPECT_LE(std::abs(r.primal - r.dual), 10.0 * tol * (1.0 + std::abs(r.primal)));
  }
}

TEST(Kkt, SvmPlusBalanceInjectionFails) {
  std::mt19937_64 rng(32);
  const Dataset data = testing::random_dataset(rng, 10, 2);
  const PrivilegedSet priv(testing::random_matrix(rng, 10, 2));
  SvmPlusModel m = solve_svmplus(data, priv, KernelSpec::rbf(1.0), KernelSpec::linear(), 1.0, 1.0);
  ASSERT_TRUE(check_svmplus_kkt(m, 1e-6).pass);
  m.beta[0] += 0.5;
  m.alpha_tilde[0] += 0.5;
  const KktReport r = check_svmplus_kkt(m, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.residual("correcting_balance"), 0.5, 1e-9);
}

TEST(Kkt, SeparableSvmPlusHasExactZeroComplementarity) {
  Matrix x(4, 1);
  x << -2, -1, 1, 2;
  Vector y(4);
  y << -1, -1, 1, 1;
  const SvmPlusModel m = solve_svmplus({x, y}, PrivilegedSet(Matrix::Zero(4, 1)), KernelSpec::linear(),
                                       KernelSpec::linear(), 10.0, 1.0);
  ASSERT_EQ(m.h.maxCoeff(), 0.0);
  const KktReport r = check_svmplus_kkt(m, 1e-6);
  EXPECT_TRUE(r.pass) << r.to_text();
}

TEST(Kkt, IndexSets) {
  Vector f(4);
  f << 2.0, 1.0, 0.5, -0.5;  // margins 2, 1, 0.5, 0.5
  Vector y(4);
  y << 1, 1, 1, -1;
  const IndexSets s = index_sets(f, y, 1e-9);
  EXPECT_EQ(s.plus, (std::vector<Eigen::Index>{0, 1, 2}));
  EXPECT_EQ(s.minus, (std::vector<Eigen::Index>{3}));
  EXPECT_EQ(s.below, (std::vector<Eigen::Index>{2, 3}));
  EXPECT_EQ(s.at_most, (std::vector<Eigen::Index>{1, 2, 3}));
}

TEST(OffsetUniqueness, CounterexampleIsUnique) {
  const OffsetUniqueness u = b_uniqueness(counterexample_model());
  EXPECT_TRUE(u.unique);
  EXPECT_FALSE(u.negative_balance);
  EXPECT_FALSE(u.positive_balance);
  EXPECT_NEAR(u.minus_below, 0.0, 1e-9);
  EXPECT_NEAR(u.plus_at_most, 6.0, 1e-9);
  EXPECT_NEAR(u.plus_below, 2.0, 1e-9);
  EXPECT_NEAR(u.minus_at_most, 6.0, 1e-9);
  EXPECT_LE(u.interval.width(), 1e-8);
}

TEST(OffsetUniqueness, BoundConstrainedPairIsNotUnique) {
  const OffsetUniqueness u = b_uniqueness(bound_constrained_pair());
  EXPECT_FALSE(u.unique);
  EXPECT_TRUE(u.negative_balance);
  EXPECT_NEAR(u.minus_below, 0.3, 1e-9);
  EXPECT_NEAR(u.plus_at_most, 0.3, 1e-9);
  EXPECT_NEAR(u.interval.lo, -0.4, 1e-9);
  EXPECT_NEAR(u.interval.hi, 0.4, 1e-9);
}

TEST(OffsetUniqueness, SeparablePairIsUnique) {
  Matrix x(2, 1);
  x << 1, -1;
  Vector y(2);
  y << 1, -1;
  const OffsetUniqueness u = b_uniqueness(solve_wsvm({x, y}, KernelSpec::linear(), Vector::Ones(2)));
  EXPECT_TRUE(u.unique);
  EXPECT_NEAR(u.interval.lo, 0.0, 1e-9);
}

TEST(OffsetUniqueness, NoSupportVectors) {
  Matrix x(2, 1);
  x << 1, 2;
  const OffsetUniqueness u = b_uniqueness(solve_wsvm({x, Vector::Ones(2)}, KernelSpec::linear(), Vector::Ones(2)));
  EXPECT_TRUE(u.no_support_vectors);
  EXPECT_FALSE(u.unique);
  EXPECT_EQ(u.interval.lo, 1.0);
}

TEST(OffsetUniqueness, AgreesWithIntervalWidth) {
  std::mt19937_64 rng(33);
  for (int rep = 0; rep < 30; ++rep) {
    const Dataset data = testing::random_dataset(rng, 6, 1);
    const WsvmModel m = solve_wsvm(data, KernelSpec::linear(), testing::random_weights(rng, 6));
    const OffsetUniqueness u = b_uniqueness(m, 1e-8);
    EXPECT_EQ(u.unique, u.interval.width() <= 1e-8);
  }
}

TEST(DualUniqueness, CounterexampleAndIdentity) {
  const WsvmModel m = counterexample_model();
  EXPECT_TRUE(dual_uniqueness_condition(gram(KernelSpec::linear(), m.train_x), m.y));
  EXPECT_TRUE(dual_uniqueness_condition(Matrix::Identity(4, 4), Vector::Ones(4)));
  EXPECT_FALSE(dual_null_direction(Matrix::Identity(4, 4), Vector::Ones(4)).has_value());
}

TEST(DualUniqueness, DuplicatedPointHasNullDirection) {
  Matrix x(4, 1);
  x << 1, 1, -1, 2;
  Vector y(4);
  y << 1, 1, -1, -1;
  const Matrix K = gram(KernelSpec::rbf(1.0), x);
  EXPECT_FALSE(dual_uniqueness_condition(K, y));
  const std::optional<Vector> d = dual_null_direction(K, y);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(d->norm(), 1.0, 1e-12);
  EXPECT_LE((y.asDiagonal() * K * y.asDiagonal() * *d).norm(), 1e-6);
  EXPECT_LE(std::abs(d->sum()), 1e-6);
  EXPECT_LE(std::abs(d->dot(y)), 1e-6);
  // The only null vector here is proportional to e_1 - e_2.
  EXPECT_NEAR(std::abs((*d)[0] - (*d)[1]), std::sqrt(2.0), 1e-6);
}

}  // namespace
}  // namespace lupi
