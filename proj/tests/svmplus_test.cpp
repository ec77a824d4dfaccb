#include "lupi/kkt.hpp"
#include "lupi/svmplus.hpp"
#include "lupi/wsvm.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace lupi {
namespace {

struct Instance {
  Dataset data;
  PrivilegedSet priv;
  KernelSpec spec;
  KernelSpec priv_spec;
};

Instance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index priv_dim = 2) {
  Instance in;
  in.data = testing::random_dataset(rng, n, 2);
  in.priv = PrivilegedSet(testing::random_matrix(rng, n, priv_dim));
  in.spec = testing::random_kernel(rng);
  in.priv_spec = testing::random_kernel(rng);
  return in;
}

TEST(SvmPlus, EqualityConstraintsAndSigns) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const Instance in = random_instance(rng, 15);
    const SvmPlusModel m = solve_svmplus(in.data, in.priv, in.spec, in.priv_spec, 1.5, 0.7);
    EXPECT_EQ(m.path, SvmPlusPath::smo);
    EXPECT_NEAR(m.alpha.dot(in.data.y()), 0.0, 1e-10);
    EXPECT_NEAR(m.alpha_tilde.sum(), 0.0, 1e-10);
    EXPECT_GE(m.alpha.minCoeff(), 0.0);
    EXPECT_GE(m.beta.minCoeff(), 0.0);
    EXPECT_NEAR(m.objective_primal, m.objective_dual, 1e-5 * (1.0 + std::abs(m.objective_primal)));
  }
}

TEST(SvmPlus, PassesKktCheck) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    const Instance in = random_instance(rng, 12);
    const SvmPlusModel m = solve_svmplus(in.data, in.priv, in.spec, in.priv_spec, 2.0, 0.5);
    const KktReport r = check_svmplus_kkt(m, 1e-6);
    EXPECT_TRUE(r.pass) << r.to_text();
  }
}

TEST(SvmPlus, MatchesProjectedGradientReference) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const Instance in = random_instance(rng, 2 + rep % 4);
    const Matrix K = gram(in.spec, in.data.x());
    const Matrix Kt = gram(in.priv_spec, in.priv.x());
    const double C = 0.5 + 0.1 * rep;
    const double gamma = 0.3 + 0.05 * rep;
    const SvmPlusModel m = solve_svmplus(in.data, in.priv, in.spec, in.priv_spec, K, Kt, C, gamma);
    const double ours = svmplus_dual_objective(K, Kt, in.data.y(), C, gamma, m.alpha, m.beta);
    const double ref = testing::reference_svmplus_dual(K, Kt, in.data.y(), C, gamma);
    EXPECT_NEAR(ours, ref, 1e-6);
    EXPECT_NEAR(ours, -m.objective_dual, 1e-9 * (1.0 + std::abs(ours)));
  }
}

TEST(SvmPlus, CorrectingValuesAtTrainingPoints) {
  std::mt19937_64 rng(24);
  const Instance in = random_instance(rng, 10);
  const SvmPlusModel m = solve_svmplus(in.data, in.priv, in.spec, in.priv_spec, 1.0, 1.0);
  EXPECT_EQ(correcting_values(m, in.priv.x()), m.xi);
  EXPECT_LE((predict(m, in.data.x()) - m.decision).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SvmPlus, ZeroCorrectingCoefficientsGiveConstant) {
  // Identical privileged features for every point make Kt constant, so the
  // correcting function is constant regardless of t.
  std::mt19937_64 rng(25);
  const Dataset data = testing::random_dataset(rng, 8, 2);
  const PrivilegedSet priv(Matrix::Zero(8, 1));
  const SvmPlusModel m = solve_svmplus(data, priv, KernelSpec::linear(), KernelSpec::linear(), 1.0, 1.0);
  const Vector xi = correcting_values(m, Matrix::Constant(3, 1, 5.0));
  EXPECT_NEAR(xi[0], m.b_tilde, 1e-12);
  EXPECT_NEAR(xi[2], m.b_tilde, 1e-12);
}

TEST(SvmPlus, GammaZeroFullRankIsPlainSvm) {
  std::mt19937_64 rng(26);
  const Dataset data = testing::random_dataset(rng, 12, 2);
  const PrivilegedSet priv(testing::random_matrix(rng, 12, 3));
  const KernelSpec rbf = KernelSpec::rbf(0.7);
  const SvmPlusModel m = solve_svmplus(data, priv, KernelSpec::linear(), rbf, 1.3, 0.0);
  EXPECT_EQ(m.path, SvmPlusPath::reduced_full_rank);
  EXPECT_LE((m.alpha + m.beta - Vector::Constant(12, 1.3)).cwiseAbs().maxCoeff(), 1e-12);
  const WsvmModel w = solve_wsvm(data, KernelSpec::linear(), Vector::Constant(12, 1.3));
  EXPECT_LE((m.alpha - w.alpha).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(m.b, w.b, 1e-8);
}

TEST(SvmPlus, GammaZeroRankDeficientRestrictsSlacks) {
  std::mt19937_64 rng(27);
  const Dataset data = testing::random_dataset(rng, 14, 2, 1.5);
  const PrivilegedSet priv(testing::random_matrix(rng, 14, 1));
  const SvmPlusModel m = solve_svmplus(data, priv, KernelSpec::linear(), KernelSpec::linear(), 1.0, 0.0);
  EXPECT_EQ(m.path, SvmPlusPath::reduced_constrained);
  ASSERT_TRUE(m.w_tilde.has_value());
  // Slacks are exactly affine in the privileged feature and dominate the hinge losses.
  const Vector affine = (priv.x() * *m.w_tilde).array() + m.b_tilde;
  EXPECT_LE((affine - m.xi).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_GE((m.xi - m.h).minCoeff(), -1e-6);
  const KktReport r = check_svmplus_kkt(m, 1e-6);
  EXPECT_TRUE(r.pass) << r.to_text();
}

TEST(SvmPlus, SeparableLargeCHasZeroLoss) {
  Matrix x(4, 1);
  x << -2, -1, 1, 2;
  Vector y(4);
  y << -1, -1, 1, 1;
  Matrix xt(4, 1);
  xt << 0.3, -0.2, 0.5, 0.1;
  const SvmPlusModel m =
      solve_svmplus({x, y}, PrivilegedSet(xt), KernelSpec::linear(), KernelSpec::linear(), 100.0, 1.0);
  EXPECT_LE(m.h.maxCoeff(), 1e-8);
}

TEST(SvmPlus, RejectsInvalidParameters) {
  std::mt19937_64 rng(28);
  const Instance in = random_instance(rng, 6);
  EXPECT_THROW(solve_svmplus(in.data, in.priv, in.spec, in.priv_spec, 0.0, 1.0), InvalidInput);
  EXPECT_THROW(solve_svmplus(in.data, in.priv, in.spec, in.priv_spec, 1.0, -1.0), InvalidInput);
  const PrivilegedSet short_priv(Matrix::Zero(5, 1));
  EXPECT_THROW(solve_svmplus(in.data, short_priv, in.spec, in.priv_spec, 1.0, 1.0), InvalidInput);
}

TEST(SvmPlus, PathNames) {
  EXPECT_EQ(to_string(SvmPlusPath::smo), "smo");
  EXPECT_EQ(to_string(SvmPlusPath::reduced_full_rank), "reduced-full-rank");
  EXPECT_EQ(to_string(SvmPlusPath::reduced_constrained), "reduced-constrained");
}

}  // namespace
}  // namespace lupi
