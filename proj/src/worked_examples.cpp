#include "fundim/worked_examples.hpp"

#include <sstream>

#include "fundim/errors.hpp"
#include "fundim/experiments.hpp"
#include "fundim/funcdim.hpp"
#include "fundim/ntk.hpp"
#include "fundim/pwl_complex.hpp"
#include "fundim/symmetry.hpp"

namespace fundim::worked {

RationalParameter make(const std::vector<size_t>& widths, const std::vector<std::string>& flat) {
  std::vector<Rational> q;
  for (const auto& s : flat) q.push_back(parse_rational(s));
  return RationalParameter::from_flat(Architecture(widths), q);
}

RationalParameter s0() { return make({1, 2, 1}, {"2", "-5", "-1", "4", "1", "1", "1"}); }
RationalParameter fiber_low() { return make({1, 2, 1}, {"1", "1", "-1", "-2", "1", "-1", "0"}); }
RationalParameter fiber_high() { return make({1, 2, 1}, {"1", "0", "-1", "0", "1", "-1", "1"}); }
RationalParameter abs_branch1() { return make({1, 2, 1}, {"1", "0", "-1", "0", "1", "1", "0"}); }
RationalParameter abs_branch2() { return make({1, 2, 1}, {"-1", "0", "1", "0", "1", "1", "0"}); }
RationalParameter two_neuron() { return make({1, 2}, {"1", "0", "1", "-1"}); }
RationalParameter chain_111() { return make({1, 1, 1}, {"1", "0", "1", "-1"}); }

namespace {

template <class V>
std::string str(const V& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string join(const std::vector<Rational>& v) {
  std::string out = "{";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + to_string(v[i]);
  return out + "}";
}

Batch<Rational> points(std::initializer_list<long> xs) {
  Batch<Rational> z;
  for (long x : xs) z.push_back({Rational(x)});
  return z;
}

size_t decisive(const RationalParameter& p) {
  FunctionalDimOptions o;
  o.strategy = DimStrategy::kDecisive1D;
  return functional_dim(p, o).value;
}

}  // namespace

std::vector<Check> demo_suite() {
  std::vector<Check> checks;
  auto add = [&](std::string name, std::string expected, auto&& compute) {
    Check c{std::move(name), std::move(expected), "", false};
    try {
      c.actual = compute();
      c.pass = c.actual == c.expected;
    } catch (const std::exception& e) {
      c.actual = std::string("error: ") + e.what();
    }
    checks.push_back(std::move(c));
  };

  add("param_dim (1,2,1)", "7", [] { return str(param_dim(Architecture({1, 2, 1}))); });
  add("param_dim (1,1)", "2", [] { return str(param_dim(Architecture({1, 1}))); });
  add("s0 output at x=3", "3", [] {
    const std::vector<Rational> x{3};
    return to_string(evaluate(s0(), std::span<const Rational>(x))[0]);
  });
  add("s0 label at x=3", "((1,1),(1))", [] {
    const std::vector<Rational> x{3};
    return ternary_label(s0(), std::span<const Rational>(x)).to_string();
  });
  add("s0 breakpoints", "{5/2,4}", [] { return join(complex_1d(s0()).breakpoints); });
  add("s0 slopes", "{-1,1,2}", [] {
    std::vector<Rational> slopes;
    for (const auto& c : complex_1d(s0()).cells) slopes.push_back(c.output[0].slope);
    return join(slopes);
  });
  add("dim_fun(s0)", "5", [] { return str(decisive(s0())); });
  add("upper_bound (1,2,1)", "5", [] { return str(upper_bound(Architecture({1, 2, 1}))); });
  for (auto [z, want] : {std::pair<long, const char*>{-1, "0"}, {2, "2"}}) {
    add("(1,2) stochastic dim at z=" + str(z), want, [z] {
      return str(stochastic_dim(two_neuron(), {Rational(z)}).value);
    });
  }
  add("(1,2) stochastic dim at z=1/2", "1", [] {
    return str(stochastic_dim(two_neuron(), {Rational(1, 2)}).value);
  });
  const auto p11 = make({1, 1}, {"1", "0"});
  add("(1,1) batch dim Z={-1,-2}", "0", [&] { return str(batch_dim(p11, points({-1, -2})).value); });
  add("(1,1) batch dim Z={1,-1}", "1", [&] { return str(batch_dim(p11, points({1, -1})).value); });
  add("(1,1) batch dim Z={1,2}", "2", [&] { return str(batch_dim(p11, points({1, 2})).value); });
  add("dim_fun(1,1,-1,-2,1,-1,0)", "2", [] { return str(decisive(fiber_low())); });
  add("dim_fun(1,0,-1,0,1,-1,1) >= 4", "true", [] {
    return std::string(decisive(fiber_high()) >= 4 ? "true" : "false");
  });
  add("node map (1,1,1) at x=2", "1", [] {
    const std::vector<Rational> x{2};
    return to_string(node_map(chain_111(), 1, 0, std::span<const Rational>(x)));
  });
  add("ones chain (1,1,1)", "3", [] { return str(decisive(ones_chain_witness(3))); });
  add("ones chain (1,1,1,1)", "4", [] { return str(decisive(ones_chain_witness(4))); });
  add("abs fiber branch", "Branch1", [] {
    return std::string(to_string(fiber_membership_absvalue(abs_branch1())));
  });
  add("abs fiber mirrored branch", "Branch2", [] {
    return std::string(to_string(fiber_membership_absvalue(abs_branch2())));
  });
  add("abs fiber rejects s0", "NotInFiber", [] {
    return std::string(to_string(fiber_membership_absvalue(s0())));
  });
  add("NTK (1,1) s=(1,1) x=1 y=2", "3", [] {
    const auto p = make({1, 1}, {"1", "1"});
    return to_string(ntk(p, {Rational(1)}, {Rational(2)})(0, 0));
  });
  add("squared-error gradient (1,1) s=(1,0) data (1,0)", "[2,2]", [&] {
    const auto g = loss_gradient_in_row_space(p11, {{{Rational(1)}, {Rational(0)}}});
    return "[" + to_string(g.backprop[0]) + "," + to_string(g.backprop[1]) + "]";
  });
  add("non-transitivity (0,0) vs (0,-1)", "true", [] {
    return std::string(nontransitivity_demo().holds() ? "true" : "false");
  });
  add("non-ordinary (1,1) s=(0,0)", "confirmed", [] { return nonordinary_demo().verdict; });
  add("depth-1 (2,3) witness", "9", [] {
    return str(depth1_witness(2, 3).summary["dim"].get<size_t>());
  });
  return checks;
}

}  // namespace fundim::worked
