// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Tolerances, trial counts and seeds are fixed here so runs are reproducible.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fundim/errors.hpp"
#include "fundim/experiments.hpp"
#include "fundim/funcdim.hpp"
#include "fundim/ntk.hpp"
#include "fundim/pwl_complex.hpp"
#include "fundim/random.hpp"
#include "fundim/symmetry.hpp"
#include "fundim/worked_examples.hpp"

namespace {

using namespace fundim;

constexpr std::uint64_t kSeed = 20240601;
constexpr double kWorkedExampleSeconds = 1.0;
constexpr double kUpperBoundSeconds = 60.0;
constexpr double kFdStep = 1e-6;
constexpr double kFdRelTol = 1e-6;
constexpr double kFdSmoothMargin = 1e-3;  // |pre-activation| at sampled points
constexpr double kPsdTol = 1e-9;
constexpr double kSvTol = 1e-7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Smooth-point searches that gave up across the randomized criteria. Logged,
// not asserted.
size_t g_smoothness_failures = 0;

Rational q(const char* s) { return parse_rational(s); }

std::string str(size_t v) { return std::to_string(v); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RationalParameter random_rational(const Architecture& arch, Rng& rng) {
  return random_parameter<Rational>(arch, rng);
}

template <class T>
bool smooth(const Parameter<T>& p, const std::vector<T>& x) {
  return !ternary_label(p, std::span<const T>(x)).has_zero();
}

// Up to n smooth random points, drawing at most 64 candidates per point.
Batch<Rational> smooth_points(const RationalParameter& p, Rng& rng, size_t n) {
  Batch<Rational> z;
  for (size_t tries = 0; z.size() < n && tries < 64 * n; ++tries) {
    auto x = random_point<Rational>(rng, p.arch().input_dim());
    if (smooth(p, x)) z.push_back(std::move(x));
  }
  if (z.size() < n) ++g_smoothness_failures;
  return z;
}

Outcome worked_example() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = worked::s0();
  FunctionalDimOptions opts;
  opts.strategy = DimStrategy::kDecisive1D;
  const auto r = functional_dim(p, opts);
  const auto c = complex_1d(p);
  const double secs = seconds_since(t0);
  std::vector<Rational> slopes;
  for (const auto& cell : c.cells) slopes.push_back(cell.output.at(0).slope);
  const bool ok = r.value == 5 && r.backend == RankBackend::kExact &&
                  r.bound == BoundKind::kExact &&
                  c.breakpoints == std::vector<Rational>{q("5/2"), q("4")} &&
                  slopes == std::vector<Rational>{q("-1"), q("1"), q("2")} &&
                  secs < kWorkedExampleSeconds;
  return {ok, "dim " + str(r.value) + ", breakpoints " + str(c.breakpoints.size()) + ", " +
                  num(secs) + " s"};
}

Outcome stochastic_two_neuron() {
  const auto p = worked::two_neuron();
  const size_t a = stochastic_dim(p, {q("-1")}).value;
  const size_t b = stochastic_dim(p, {q("1/2")}).value;
  const size_t c = stochastic_dim(p, {q("2")}).value;
  return {a == 0 && b == 1 && c == 2, str(a) + "/" + str(b) + "/" + str(c)};
}

Outcome batch_single_neuron() {
  const auto p = worked::make({1, 1}, {"1", "0"});
  const auto b = [&](const char* x, const char* y) {
    return batch_dim(p, Batch<Rational>{{q(x)}, {q(y)}}).value;
  };
  const size_t a = b("-1", "-2"), m = b("1", "-1"), c = b("1", "2");
  return {a == 0 && m == 1 && c == 2, str(a) + "/" + str(m) + "/" + str(c)};
}

Outcome fiber_dimension_varies() {
  FunctionalDimOptions opts;
  opts.strategy = DimStrategy::kDecisive1D;
  const auto low = worked::fiber_low(), high = worked::fiber_high();
  const size_t dl = functional_dim(low, opts).value;
  const size_t dh = functional_dim(high, opts).value;
  bool same_function = true;
  for (const auto& x : input_grid<Rational>(1, 161)) {
    const Rational target = relu(Rational(x[0] + 1));
    same_function = same_function && evaluate(low, std::span<const Rational>(x))[0] == target &&
                    evaluate(high, std::span<const Rational>(x))[0] == target;
  }
  return {dl == 2 && dh >= 4 && same_function,
          "low " + str(dl) + ", high " + str(dh) + (same_function ? "" : ", function mismatch")};
}

Outcome bound_never_exceeded() {
  const auto t0 = std::chrono::steady_clock::now();
  size_t violations = 0, trials = 0;
  std::string maxes;
  for (const auto& w : std::vector<std::vector<size_t>>{{1, 2, 1}, {2, 3, 2}, {3, 2, 1}, {2, 2, 2, 1}}) {
    const auto r = upper_bound_check(Architecture(w), 1000, kSeed);
    violations += r.summary["bound_violations"].get<size_t>();
    g_smoothness_failures += r.summary["non_ordinary_trials"].get<size_t>();
    trials += r.trials;
    maxes += (maxes.empty() ? "" : ",") + r.summary["max"].dump() + "/" +
             r.summary["upper_bound"].dump();
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && trials == 4000 && secs < kUpperBoundSeconds,
          "max/bound " + maxes + ", violations " + str(violations) + ", " + num(secs) +
              " s"};
}

Outcome narrowing_tightness() {
  const auto a = tightness_search(Architecture({3, 2, 1}), 500, kSeed);
  const auto b = tightness_search(Architecture({4, 3, 1}), 500, kSeed);
  const bool ok = a.verdict == "attained" && b.verdict == "attained" && a.summary["max"] == 9 &&
                  b.summary["max"] == 16;
  return {ok, "(3,2,1) " + a.summary["max"].dump() + " " + a.verdict + ", (4,3,1) " +
                  b.summary["max"].dump() + " " + b.verdict};
}

Outcome ones_chain() {
  const std::vector<size_t> expected{2, 3, 4, 4, 4};
  bool ok = true;
  std::string seen;
  FunctionalDimOptions opts;
  opts.strategy = DimStrategy::kDecisive1D;
  for (size_t len = 2; len <= 6; ++len) {
    const auto r = ones_chain_dim(len, 200, kSeed);
    const size_t best = r.summary["max"].get<size_t>();
    ok = ok && best == expected[len - 2] && r.summary["type_closure_failures"] == 0;
    if (len >= 4) {
      ok = ok && best <= 4 && functional_dim(ones_chain_witness(len), opts).value == 4;
    }
    seen += (seen.empty() ? "" : ",") + str(best);
  }
  return {ok, "sup " + seen};
}

Outcome ntk_equivalence() {
  const std::vector<std::vector<size_t>> archs{{1, 2, 1}, {2, 2, 1}, {2, 3, 2}, {1, 3, 2, 1}, {3, 2, 2}};
  size_t mismatches = 0, asymmetric = 0, not_psd = 0, ran = 0;
  double min_eig = 1e300;
  for (size_t t = 0; t < 100; ++t) {
    Rng rng(kSeed, 800 + t);
    const Architecture arch(archs[t % archs.size()]);
    const auto p = random_rational(arch, rng);
    const auto z = smooth_points(p, rng, 1 + rng.uniform_int(0, 5));
    if (z.empty()) continue;
    mismatches += !verify_rank_equality(p, z).equal();
    const auto k = batch_ntk(p, z);
    asymmetric += !(k == k.transpose());
    const double e = min_eigenvalue(to_float(k));
    min_eig = std::min(min_eig, e);
    not_psd += e < -kPsdTol;
    ++ran;
  }
  return {ran == 100 && mismatches == 0 && asymmetric == 0 && not_psd == 0,
          str(ran) + " triples, mismatches " + str(mismatches) + ", min eigenvalue " + num(min_eig)};
}

Outcome gradient_subspace() {
  const std::vector<std::vector<size_t>> archs{{1, 2, 1}, {2, 2, 1}, {2, 3, 2}};
  size_t bad_match = 0, outside = 0, ran = 0;
  for (size_t t = 0; t < 100; ++t) {
    Rng rng(kSeed, 900 + t);
    const Architecture arch(archs[t % archs.size()]);
    const auto p = random_rational(arch, rng);
    const auto z = smooth_points(p, rng, 3);
    if (z.empty()) continue;
    std::vector<Sample<Rational>> data;
    for (const auto& x : z) {
      std::vector<Rational> y(arch.output_dim());
      for (auto& v : y) v = random_entry<Rational>(rng);
      data.push_back({x, y});
    }
    const auto g = loss_gradient_in_row_space(p, data);
    bad_match += !g.match;
    outside += !g.in_row_space;
    ++ran;
  }
  return {ran == 100 && bad_match == 0 && outside == 0,
          str(ran) + " instances, mismatches " + str(bad_match) + ", outside row space " +
              str(outside)};
}

Outcome jacobian_oracle() {
  const std::vector<std::vector<size_t>> archs{{1, 2, 1}, {2, 3, 2}, {3, 2, 2, 1}};
  double worst = 0;
  size_t ran = 0;
  for (size_t t = 0; t < 100; ++t) {
    Rng rng(kSeed, 1000 + t);
    const Architecture arch(archs[t % archs.size()]);
    std::vector<double> flat(param_dim(arch));
    for (auto& v : flat) v = rng.uniform(-1, 1);
    const auto p = FloatParameter::from_flat(arch, std::span<const double>(flat));
    Batch<double> z;
    for (size_t tries = 0; z.size() < 3 && tries < 500; ++tries) {
      auto x = random_point<double>(rng, arch.input_dim());
      const auto tr = forward(p, std::span<const double>(x));
      bool far = true;
      for (const auto& layer : tr.pre)
        for (double y : layer) far = far && std::abs(y) > kFdSmoothMargin;
      if (far) z.push_back(std::move(x));
    }
    if (z.empty()) {
      ++g_smoothness_failures;
      continue;
    }
    const auto exact = eval_jacobian(p, z);
    const auto fd = eval_jacobian_fd(p, z, kFdStep);
    for (size_t i = 0; i < exact.entries().size(); ++i) {
      const double a = exact.entries()[i], b = fd.value.entries()[i];
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    ++ran;
  }
  return {ran == 100 && worst < kFdRelTol,
          str(ran) + " instances, max relative error " + num(worst)};
}

// Random one-input instances that pass the stability probe and transversality.
struct StableInstance {
  RationalParameter p;
  Complex1D<Rational> complex;
};

const std::vector<StableInstance>& stable_instances() {
  static const std::vector<StableInstance> instances = [] {
    std::vector<StableInstance> out;
    for (const auto& w : std::vector<std::vector<size_t>>{{1, 2, 1}, {1, 3, 1}}) {
      const Architecture arch(w);
      for (std::uint64_t t = 0; out.size() < (w[1] == 2 ? 25u : 50u) && t < 2000; ++t) {
        Rng rng(kSeed, 1100 + 5000 * w[1] + t);
        auto p = random_rational(arch, rng);
        auto c = complex_1d(p);
        if (!is_transversal_1d(p, c)) continue;
        if (!probe_combinatorial_stability(p, q("1/1000"), 50, t).stable) continue;
        out.push_back({std::move(p), std::move(c)});
      }
    }
    return out;
  }();
  return instances;
}

Outcome decisive_sufficiency() {
  const auto& inst = stable_instances();
  size_t mismatches = 0, dead = 0;
  for (size_t i = 0; i < inst.size(); ++i) {
    const auto& [p, c] = inst[i];
    const auto ds = decisive_set(p, c);
    if (ds.points.empty()) {
      ++dead;
      continue;
    }
    Rng rng(kSeed, 1300 + i);
    Batch<Rational> z = ds.points;
    for (auto& x : smooth_points(p, rng, 20)) z.push_back(std::move(x));
    mismatches += batch_dim(p, ds.points).value != batch_dim(p, z).value;
  }
  return {inst.size() == 50 && mismatches == 0,
          str(inst.size()) + " instances, mismatches " + str(mismatches) +
              (dead ? ", without smooth cells " + str(dead) : "")};
}

Outcome sv_equivalence() {
  const auto& inst = stable_instances();
  size_t mismatches = 0, unstable = 0;
  FunctionalDimOptions opts;
  opts.strategy = DimStrategy::kDecisive1D;
  std::string first;
  for (const auto& [p, c] : inst) {
    size_t sv = 0, fd = 0;
    try {
      sv = sv_rank(p, 1e-6, kSvTol).value;
      fd = functional_dim(p, opts).value;
    } catch (const CombinatorialInstability&) {
      ++unstable;
      continue;
    } catch (const NonOrdinarySuspected&) {
      fd = 0;
    }
    if (sv != fd) {
      if (first.empty()) first = " (first: sv " + str(sv) + " vs " + str(fd) + ")";
      ++mismatches;
    }
  }
  return {inst.size() == 50 && mismatches == 0 && unstable == 0,
          str(inst.size()) + " instances, mismatches " + str(mismatches) + first +
              (unstable ? ", unstable " + str(unstable) : "")};
}

Outcome symmetry_invariance() {
  const std::vector<std::vector<size_t>> archs{{1, 2, 1}, {1, 3, 2}, {2, 3, 1}, {2, 2, 2, 1}};
  size_t changed_function = 0, changed_dim = 0;
  for (size_t t = 0; t < 100; ++t) {
    Rng rng(kSeed, 1400 + t);
    const Architecture arch(archs[t % archs.size()]);
    const auto p = random_rational(arch, rng);
    const auto g = random_symmetry(arch, 1 + rng.uniform_int(0, 5), kSeed, t);
    const auto gp = apply_symmetry(g, p);
    const auto grid = input_grid<Rational>(arch.input_dim(), 41);
    Batch<Rational> shared;
    bool same = true;
    for (const auto& x : grid) {
      same = same && evaluate(p, std::span<const Rational>(x)) == evaluate(gp, std::span<const Rational>(x));
      if (smooth(p, x) && smooth(gp, x) && shared.size() < 2 * param_dim(arch)) shared.push_back(x);
    }
    changed_function += !same;
    if (!shared.empty()) changed_dim += batch_dim(p, shared).value != batch_dim(gp, shared).value;
  }
  return {changed_function == 0 && changed_dim == 0,
          "function changes " + str(changed_function) + ", dim changes " + str(changed_dim)};
}

Outcome disconnected_fiber() {
  const auto b1 = fiber_membership_absvalue(worked::abs_branch1());
  const auto b2 = fiber_membership_absvalue(worked::abs_branch2());
  const auto s0 = fiber_membership_absvalue(worked::s0());
  const auto grid = input_grid<Rational>(1, 161);
  const bool realized = realizes_abs(worked::abs_branch1(), grid) && realizes_abs(worked::abs_branch2(), grid);
  return {b1 == FiberBranch::kBranch1 && b2 == FiberBranch::kBranch2 &&
              s0 == FiberBranch::kNotInFiber && realized,
          std::string(to_string(b1)) + ", " + std::string(to_string(b2)) + ", " +
              std::string(to_string(s0))};
}

Outcome stably_unactivated() {
  const auto r = stably_unactivated_frequency(Architecture({2, 1, 2, 3, 2}), 100000, kSeed);
  bool fan_ins[4] = {false, false, false, false};
  for (const auto& rec : r.records) {
    const size_t f = rec["fan_in"].get<size_t>();
    if (f <= 3) fan_ins[f] = true;
  }
  return {r.verdict == "within_3_std_err" && fan_ins[1] && fan_ins[2] && fan_ins[3],
          r.verdict + ", max |z| " + r.summary["max_abs_z"].dump()};
}

Outcome nonordinary() {
  const auto r = nonordinary_demo();
  const bool ok = r.verdict == "confirmed" && r.summary["all_disagree"].get<bool>() &&
                  r.summary["control"]["agree"].get<bool>();
  return {ok, r.verdict + " over " + str(r.records.size()) + " quotients"};
}

Outcome depth1() {
  const auto r = depth1_witness(2, 3, kSeed);
  const size_t d = r.summary["dim"].get<size_t>();
  return {d == 9 && d == param_dim(Architecture({2, 3})), "dim " + str(d)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"worked (1,2,1) example", worked_example},
      {"stochastic dimension (1,2)", stochastic_two_neuron},
      {"batch dimension (1,1)", batch_single_neuron},
      {"fiber with varying dimension", fiber_dimension_varies},
      {"upper bound", bound_never_exceeded},
      {"narrowing tightness", narrowing_tightness},
      {"ones chain", ones_chain},
      {"NTK rank equivalence", ntk_equivalence},
      {"gradient in Jacobian row space", gradient_subspace},
      {"Jacobian finite-difference oracle", jacobian_oracle},
      {"decisive set sufficiency", decisive_sufficiency},
      {"slopes-and-values rank", sv_equivalence},
      {"symmetry invariance", symmetry_invariance},
      {"disconnected |x| fiber", disconnected_fiber},
      {"stably unactivated frequency", stably_unactivated},
      {"non-ordinary point", nonordinary},
      {"depth-1 witness", depth1},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %-36s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("smooth-point searches that gave up: %zu\n", g_smoothness_failures);
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
