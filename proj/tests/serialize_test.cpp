#include "lupi/serialize.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

namespace lupi {
namespace {

TEST(Numbers, SeventeenDigitsRoundTrip) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = unif(rng) * std::pow(10.0, k % 40 - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(parse_double("-inf"), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_double(""), InvalidInput);
  EXPECT_THROW(parse_double("1.5x"), InvalidInput);
}

TEST(Numbers, SignificantDigits) {
  EXPECT_EQ(format_significant(0.052225, 6), "0.052225");
  EXPECT_EQ(format_significant(2.0 / 3.0, 6), "0.666667");
  EXPECT_EQ(format_significant(0.0, 6), "0");
  EXPECT_EQ(format_significant(1234567.0, 6), "1.23457e+06");
}

TEST(KeyValues, ParsesAndSkipsComments) {
  std::istringstream in("# comment\n  a = 1 \n\nb=x=y\n");
  const auto kv = read_key_values(in);
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b"), "x=y");
  std::istringstream bad("novalue\n");
  EXPECT_THROW(read_key_values(bad), InvalidInput);
}

TEST(ModelRecord, WsvmRoundTripPredictsIdentically) {
  std::mt19937_64 rng(102);
  const Dataset data = testing::random_dataset(rng, 20, 3);
  const WsvmModel m = solve_wsvm(data, KernelSpec::rbf(0.9), testing::random_weights(rng, 20));
  std::stringstream s;
  write_model(s, m);
  const WsvmModel back = read_wsvm_model(s);
  EXPECT_EQ(back.kernel, m.kernel);
  EXPECT_EQ(back.b, m.b);
  EXPECT_EQ(back.b_interval.lo, m.b_interval.lo);
  const Matrix q = testing::random_matrix(rng, 15, 3);
  EXPECT_LE((predict(back, q) - predict(m, q)).cwiseAbs().maxCoeff(), 1e-12);
  // Loading renumbers the support vectors; after that the record is a fixed point.
  std::stringstream once;
  write_model(once, back);
  const std::string text = once.str();
  std::stringstream twice;
  write_model(twice, read_wsvm_model(once));
  EXPECT_EQ(twice.str(), text);
}

TEST(ModelRecord, SvmPlusRoundTrip) {
  std::mt19937_64 rng(103);
  const Dataset data = testing::random_dataset(rng, 15, 2);
  const PrivilegedSet priv(testing::random_matrix(rng, 15, 2));
  const SvmPlusModel m = solve_svmplus(data, priv, KernelSpec::linear(), KernelSpec::rbf(1.0), 1.0, 0.5);
  std::stringstream s;
  write_model(s, m);
  const SvmPlusModel back = read_svmplus_model(s);
  EXPECT_EQ(back.path, m.path);
  EXPECT_EQ(back.gamma, m.gamma);
  EXPECT_EQ(back.b_tilde, m.b_tilde);
  const Matrix q = testing::random_matrix(rng, 10, 2);
  EXPECT_LE((predict(back, q) - predict(m, q)).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix t = testing::random_matrix(rng, 10, 2);
  EXPECT_LE((correcting_values(back, t) - correcting_values(m, t)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ModelRecord, ConstrainedPathKeepsAffineSlack) {
  std::mt19937_64 rng(104);
  const Dataset data = testing::random_dataset(rng, 14, 2, 1.5);
  const PrivilegedSet priv(testing::random_matrix(rng, 14, 1));
  const SvmPlusModel m = solve_svmplus(data, priv, KernelSpec::linear(), KernelSpec::linear(), 1.0, 0.0);
  ASSERT_EQ(m.path, SvmPlusPath::reduced_constrained);
  std::stringstream s;
  write_model(s, m);
  const SvmPlusModel back = read_svmplus_model(s);
  ASSERT_TRUE(back.w_tilde.has_value());
  EXPECT_EQ(*back.w_tilde, *m.w_tilde);
  EXPECT_EQ(correcting_values(back, priv.x()), correcting_values(m, priv.x()));
}

TEST(ModelRecord, RejectsWrongType) {
  Matrix x(2, 1);
  x << 1, -1;
  const WsvmModel m = solve_wsvm({x, (Vector(2) << 1, -1).finished()}, KernelSpec::linear(), Vector::Ones(2));
  std::stringstream s;
  write_model(s, m);
  EXPECT_THROW(read_svmplus_model(s), InvalidInput);
  std::istringstream junk("model=wsvm\nkernel=linear\ndim=1\nb=0\nb_lo=0\nb_hi=0\nsv 0\nend\n");
  EXPECT_THROW(read_wsvm_model(junk), InvalidInput);
}

}  // namespace
}  // namespace lupi
