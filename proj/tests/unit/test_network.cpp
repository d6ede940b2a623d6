#include <gtest/gtest.h>

#include "fundim/network.hpp"
#include "fundim/random.hpp"
#include "helpers.hpp"

namespace fundim {
namespace {

using testing::net;
using testing::q;
using testing::qv;
using testing::sp;

TernaryLabel lab(std::vector<std::vector<std::int8_t>> l) { return TernaryLabel{std::move(l)}; }

TEST(Architecture, ParamDim) {
  EXPECT_EQ(param_dim(Architecture({1, 2, 1})), 7u);
  EXPECT_EQ(param_dim(Architecture({1, 1})), 2u);
  EXPECT_EQ(param_dim(Architecture({3, 2, 1})), 11u);
}

TEST(Architecture, RejectsDegenerateWidths) {
  EXPECT_THROW(Architecture({1}), std::invalid_argument);
  EXPECT_THROW(Architecture({1, 0, 1}), std::invalid_argument);
}

TEST(Parameter, FlatRoundTrip) {
  const auto p = worked::s0();
  EXPECT_EQ(p.flatten(), qv({"2", "-5", "-1", "4", "1", "1", "1"}));
  EXPECT_EQ(p.layer(0)(1, 1), q("4"));
  EXPECT_EQ(p.offset(1), 4u);
  EXPECT_EQ(RationalParameter::from_flat(p.arch(), sp(p.flatten())), p);
}

TEST(Parameter, RejectsShapeMismatch) {
  EXPECT_THROW(RationalParameter(Architecture({1, 2, 1}), {RationalMatrix(2, 2)}),
               std::invalid_argument);
  const auto short_flat = qv({"1", "2"});
  EXPECT_THROW(RationalParameter::from_flat(Architecture({1, 2, 1}), sp(short_flat)),
               std::invalid_argument);
}

TEST(Forward, WorkedExample) {
  const auto p = worked::s0();
  EXPECT_EQ(evaluate(p, sp(qv({"3"}))), qv({"3"}));
  EXPECT_EQ(evaluate(p, sp(qv({"0"}))), qv({"5"}));
  const auto zero = RationalParameter::zeros(p.arch());
  EXPECT_EQ(evaluate(zero, sp(qv({"-7/3"}))), qv({"0"}));
}

TEST(Forward, TraceMatchesEvaluate) {
  const auto p = worked::s0();
  const auto tr = forward(p, sp(qv({"6"})));
  EXPECT_EQ(tr.output(), evaluate(p, sp(qv({"6"}))));
  EXPECT_EQ(tr.pre.size(), 2u);
  EXPECT_EQ(tr.pre[0], qv({"7", "-2"}));
}

TEST(Forward, RejectsWrongInputSize) {
  EXPECT_THROW(evaluate(worked::s0(), sp(qv({"1", "2"}))), std::invalid_argument);
}

TEST(TernaryLabel, WorkedExample) {
  const auto p = worked::s0();
  EXPECT_EQ(ternary_label(p, sp(qv({"3"}))), lab({{1, 1}, {1}}));
  EXPECT_EQ(ternary_label(p, sp(qv({"0"}))), lab({{-1, 1}, {1}}));
  EXPECT_EQ(ternary_label(p, sp(qv({"5/2"}))), lab({{0, 1}, {1}}));
  EXPECT_EQ(lab({{-1, 1}, {1}}).to_string(), "((-1,1),(1))");
}

TEST(TernaryLabel, FloatZeroTolerance) {
  const auto p = to_float(worked::s0());
  const std::vector<double> x{2.5 + 1e-14};
  EXPECT_EQ(ternary_label(p, std::span<const double>(x)), lab({{0, 1}, {1}}));
  EXPECT_EQ(ternary_label(p, std::span<const double>(x), 0.0), lab({{1, 1}, {1}}));
}

TEST(MaskedAffine, AllOnIsIdentity) {
  const auto p = worked::s0();
  const auto m = masked_affine(p, lab({{1, 1}, {1}}));
  EXPECT_EQ(m.masked, p.layers());
  EXPECT_EQ(m.augmented[0].rows(), 3u);
  EXPECT_EQ(m.augmented[0](2, 1), q("1"));
}

TEST(MaskedAffine, AllOffZeroesEverything) {
  const auto m = masked_affine(worked::s0(), lab({{-1, -1}, {-1}}));
  for (const auto& a : m.masked)
    for (const auto& v : a.entries()) EXPECT_EQ(v, 0);
}

TEST(MaskedAffine, LeftPiece) {
  const auto m = masked_affine(worked::s0(), lab({{-1, 1}, {1}}));
  EXPECT_EQ(m.masked[0], RationalMatrix(2, 2, qv({"0", "0", "-1", "4"})));
}

TEST(NodeMap, Chain) {
  const auto p = worked::chain_111();
  EXPECT_EQ(node_map(p, 0, 0, sp(qv({"2"}))), q("2"));
  EXPECT_EQ(node_map(p, 1, 0, sp(qv({"2"}))), q("1"));
  EXPECT_EQ(node_map(p, 1, 0, sp(qv({"0"}))), q("0"));
}

TEST(Smoothness, Examples) {
  EXPECT_EQ(smoothness(worked::s0(), sp(qv({"3"}))), Smoothness::kSmoothNoZeros);
  // The output neuron is strictly negative on a neighbourhood, so the zero
  // first-layer neuron cannot change the function locally.
  EXPECT_EQ(smoothness(worked::chain_111(), sp(qv({"0"}))), Smoothness::kSmoothStableDead);
  const auto dead = net({1, 1}, {"0", "0"});
  for (const char* x : {"-2", "0", "3"}) {
    EXPECT_EQ(smoothness(dead, sp(qv({x}))), Smoothness::kUnknown) << x;
  }
}

TEST(StablyUnactivated, SufficientCondition) {
  // Layer 0 has no upstream ReLU, so the condition does not apply.
  EXPECT_THROW(stably_unactivated_sufficient(net({1, 1}, {"-1", "-1"}), 0, 0),
               std::invalid_argument);
  const auto two_in = [](const char* a, const char* b, const char* c) {
    return net({1, 2, 1}, {"1", "0", "1", "0", a, b, c});
  };
  EXPECT_TRUE(stably_unactivated_sufficient(two_in("-1", "-1", "-1"), 1, 0));
  EXPECT_FALSE(stably_unactivated_sufficient(two_in("1", "-1", "-1"), 1, 0));
  EXPECT_FALSE(stably_unactivated_sufficient(two_in("0", "0", "0"), 1, 0));
}

TEST(StablyUnactivated, IntervalBound) {
  // Pre-activation of the output is -relu(x) - 1 <= -1 everywhere.
  const auto p = net({1, 1, 1}, {"1", "0", "-1", "-1"});
  EXPECT_TRUE(stably_unactivated_interval(p, 1, 0));
  EXPECT_FALSE(stably_unactivated_interval(worked::s0(), 1, 0));
}

TEST(Conversions, RationalFloatRoundTrip) {
  const auto p = worked::s0();
  EXPECT_EQ(to_rational(to_float(p)), p);
}

// Positive homogeneity: rho(s)(t x) = t rho(s)(x) for zero biases, t > 0.
TEST(ForwardProperty, PositiveHomogeneityWithoutBias) {
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng(11, t);
    const Architecture arch({2, 3, 2});
    auto p = RationalParameter::zeros(arch);
    std::vector<Rational> flat = p.flatten();
    for (size_t l = 0, k = 0; l < arch.depth(); ++l)
      for (size_t r = 0; r < arch.width(l + 1); ++r)
        for (size_t c = 0; c <= arch.width(l); ++c, ++k)
          flat[k] = c == arch.width(l) ? Rational(0) : random_entry<Rational>(rng);
    p = RationalParameter::from_flat(arch, sp(flat));
    const auto x = random_point<Rational>(rng, 2);
    std::vector<Rational> tx = x;
    for (auto& v : tx) v *= 3;
    auto y = evaluate(p, sp(x));
    for (auto& v : y) v *= 3;
    EXPECT_EQ(evaluate(p, sp(tx)), y);
  }
}

}  // namespace
}  // namespace fundim
