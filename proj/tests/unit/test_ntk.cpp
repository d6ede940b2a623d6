#include <gtest/gtest.h>

#include "fundim/ntk.hpp"
#include "fundim/pwl_complex.hpp"
#include "fundim/random.hpp"
#include "helpers.hpp"

namespace fundim {
namespace {

using testing::batch1;
using testing::net;
using testing::q;
using testing::qv;

TEST(Ntk, SingleNeuron) {
  const auto p = net({1, 1}, {"1", "1"});
  EXPECT_EQ(ntk(p, qv({"1"}), qv({"2"})), RationalMatrix(1, 1, qv({"3"})));
  EXPECT_EQ(ntk(p, qv({"3/2"}), qv({"3/2"})), RationalMatrix(1, 1, qv({"13/4"})));
}

TEST(Ntk, InactivePointsGiveZero) {
  const auto p = net({1, 1}, {"1", "0"});
  EXPECT_EQ(ntk(p, qv({"-1"}), qv({"-2"})), RationalMatrix(1, 1));
  EXPECT_EQ(batch_ntk(p, batch1({"-1", "-2"})), RationalMatrix(2, 2));
}

TEST(BatchNtk, GramMatrix) {
  const auto p = net({1, 1}, {"1", "0"});
  EXPECT_EQ(batch_ntk(p, batch1({"1", "2"})), RationalMatrix(2, 2, qv({"2", "3", "3", "5"})));
}

TEST(BatchNtk, SingletonMatchesPairKernel) {
  const auto p = worked::s0();
  EXPECT_EQ(batch_ntk(p, batch1({"3"})), ntk(p, qv({"3"}), qv({"3"})));
}

TEST(RankEquality, WorkedExampleDecisiveBatch) {
  const auto p = worked::s0();
  const auto ds = decisive_set(p, complex_1d(p));
  const auto eq = verify_rank_equality(p, ds.points);
  EXPECT_EQ(eq.jac_rank, 5u);
  EXPECT_EQ(eq.ntk_rank, 5u);
}

TEST(RankEqualityProperty, RandomNetworks) {
  for (std::uint64_t t = 0; t < 40; ++t) {
    Rng rng(17, t);
    const Architecture arch({2, 2, 2});
    std::vector<Rational> flat(param_dim(arch));
    for (auto& v : flat) v = random_entry<Rational>(rng);
    const auto p = RationalParameter::from_flat(arch, std::span<const Rational>(flat));
    Batch<Rational> z;
    while (z.size() < 4) {
      auto x = random_point<Rational>(rng, 2);
      if (!ternary_label(p, std::span<const Rational>(x)).has_zero()) z.push_back(std::move(x));
    }
    const auto eq = verify_rank_equality(p, z);
    EXPECT_TRUE(eq.equal()) << "trial " << t;
    const auto k = batch_ntk(p, z);
    EXPECT_EQ(k, k.transpose());
    EXPECT_GE(min_eigenvalue(to_float(k)), -1e-9);
  }
}

TEST(MinEigenvalue, Diagonal) {
  EXPECT_DOUBLE_EQ(min_eigenvalue(FloatMatrix(2, 2, {3, 0, 0, -1})), -1.0);
}

TEST(Gradient, SquaredErrorHandExample) {
  const auto p = net({1, 1}, {"1", "0"});
  const auto g = loss_gradient_in_row_space(p, {{qv({"1"}), qv({"0"})}});
  EXPECT_EQ(g.backprop, qv({"2", "2"}));
  EXPECT_TRUE(g.match);
  EXPECT_TRUE(g.in_row_space);
}

TEST(Gradient, ZeroResidualGivesZeroGradient) {
  const auto p = worked::s0();
  const auto g = loss_gradient_in_row_space(p, {{qv({"3"}), qv({"3"})}, {qv({"0"}), qv({"5"})}});
  for (const auto& v : g.backprop) EXPECT_EQ(v, 0);
  EXPECT_TRUE(g.in_row_space);
}

TEST(Gradient, RandomInstanceInRowSpace) {
  Rng rng(23);
  const Architecture arch({1, 2, 1});
  std::vector<Rational> flat(param_dim(arch));
  for (auto& v : flat) v = random_entry<Rational>(rng);
  const auto p = RationalParameter::from_flat(arch, std::span<const Rational>(flat));
  std::vector<Sample<Rational>> data;
  while (data.size() < 3) {
    auto x = random_point<Rational>(rng, 1);
    if (ternary_label(p, std::span<const Rational>(x)).has_zero()) continue;
    data.push_back({x, {random_entry<Rational>(rng)}});
  }
  const auto g = loss_gradient_in_row_space(p, data);
  EXPECT_TRUE(g.match);
  EXPECT_TRUE(g.in_row_space);
}

}  // namespace
}  // namespace fundim
