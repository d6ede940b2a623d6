#include "fundim/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "fundim/errors.hpp"
#include "fundim/network.hpp"
#include "fundim/parallel.hpp"
#include "fundim/pwl_complex.hpp"

namespace fundim {

using nlohmann::json;

template <class T>
Parameter<T> random_parameter(const Architecture& arch, Rng& rng, std::int64_t bound) {
  std::vector<T> flat(param_dim(arch));
  for (auto& v : flat) v = random_entry<T>(rng, bound);
  return Parameter<T>::from_flat(arch, flat);
}

template RationalParameter random_parameter(const Architecture&, Rng&, std::int64_t);
template FloatParameter random_parameter(const Architecture&, Rng&, std::int64_t);

bool is_narrowing(const Architecture& arch) {
  for (size_t i = 0; i + 1 < arch.widths().size(); ++i) {
    if (arch.width(i) <= arch.width(i + 1)) return false;
  }
  return true;
}

namespace {

json widths_json(const Architecture& arch) { return json(arch.widths()); }

// Decisive sets when the input is one-dimensional, random saturation
// otherwise.
size_t dimension_of(const RationalParameter& p, std::uint64_t seed) {
  FunctionalDimOptions opts;
  opts.seed = seed;
  if (p.arch().input_dim() == 1) opts.strategy = DimStrategy::kDecisive1D;
  return functional_dim(p, opts).value;
}

std::uint64_t trial_seed(std::uint64_t seed, size_t trial) {
  return splitmix64(seed ^ splitmix64(trial + 1));
}

struct DimTrial {
  std::optional<size_t> dim;  // nullopt: no smooth point found
  std::string error;
};

std::vector<DimTrial> random_dims(const Architecture& arch, size_t trials, std::uint64_t seed) {
  return parallel_map<DimTrial>(trials, [&](size_t t) {
    Rng rng(seed, t);
    const auto p = random_parameter<Rational>(arch, rng);
    DimTrial out;
    try {
      out.dim = dimension_of(p, trial_seed(seed, t));
    } catch (const NonOrdinarySuspected& e) {
      out.error = e.what();
    }
    return out;
  });
}

}  // namespace

ExperimentReport tightness_search(const Architecture& arch, size_t trials, std::uint64_t seed) {
  if (!is_narrowing(arch)) {
    throw std::invalid_argument("tightness_search needs a strictly narrowing architecture, got " +
                                to_string(arch));
  }
  ExperimentReport r;
  r.name = "tightness";
  r.seed = seed;
  r.trials = trials;
  r.config = {{"widths", widths_json(arch)}, {"entries", "dyadic [-2,2] / 64"}};
  const size_t bound = upper_bound(arch);
  const auto dims = random_dims(arch, trials, seed);
  size_t best = 0, violations = 0, non_ordinary = 0;
  std::optional<size_t> first_attained;
  for (size_t t = 0; t < dims.size(); ++t) {
    json rec = {{"trial", t}};
    if (dims[t].dim) {
      const size_t d = *dims[t].dim;
      rec["dim"] = d;
      best = std::max(best, d);
      violations += d > bound;
      if (d == bound && !first_attained) first_attained = t;
    } else {
      rec["error"] = dims[t].error;
      ++non_ordinary;
    }
    r.records.push_back(std::move(rec));
  }
  r.summary = {{"max", best},
               {"upper_bound", bound},
               {"param_dim", param_dim(arch)},
               {"bound_violations", violations},
               {"non_ordinary_trials", non_ordinary}};
  if (first_attained) r.summary["first_attaining_trial"] = *first_attained;
  r.verdict = violations ? "bound_violated" : best == bound ? "attained" : "inconclusive";
  return r;
}

ExperimentReport upper_bound_check(const Architecture& arch, size_t trials, std::uint64_t seed) {
  ExperimentReport r;
  r.name = "upper-bound";
  r.seed = seed;
  r.trials = trials;
  r.config = {{"widths", widths_json(arch)}, {"entries", "dyadic [-2,2] / 64"}};
  const size_t bound = upper_bound(arch);
  const auto dims = random_dims(arch, trials, seed);
  size_t best = 0, violations = 0, non_ordinary = 0;
  for (size_t t = 0; t < dims.size(); ++t) {
    if (!dims[t].dim) {
      ++non_ordinary;
      r.records.push_back({{"trial", t}, {"error", dims[t].error}});
      continue;
    }
    const size_t d = *dims[t].dim;
    best = std::max(best, d);
    if (d > bound) {
      ++violations;
      r.records.push_back({{"trial", t}, {"dim", d}});
    }
  }
  r.summary = {{"max", best},
               {"upper_bound", bound},
               {"bound_violations", violations},
               {"non_ordinary_trials", non_ordinary}};
  r.verdict = violations ? "bound_violated" : "within_bound";
  return r;
}

std::string to_string(OneDimType t) {
  return t == OneDimType::kOther ? "Other" : "Type" + std::to_string(static_cast<int>(t));
}

template <class T>
OneDimType classify_1d_type(const Parameter<T>& p) {
  for (size_t w : p.arch().widths()) {
    if (w != 1) throw std::invalid_argument("classify_1d_type requires widths all 1");
  }
  const Complex1D<T> c = complex_1d(p);
  std::vector<int> signs;
  std::optional<T> last_slope;
  for (const auto& cell : c.cells) {
    const T& slope = cell.output[0].slope;
    if (last_slope && *last_slope == slope) continue;
    last_slope = slope;
    signs.push_back(ScalarTraits<T>::sign(slope, kDefaultZeroTol));
  }
  using V = std::vector<int>;
  if (signs == V{0}) return OneDimType::kType1;
  if (signs == V{0, 1}) return OneDimType::kType2;
  if (signs == V{-1, 0}) return OneDimType::kType3;
  if (signs == V{0, 1, 0}) return OneDimType::kType4;
  if (signs == V{0, -1, 0}) return OneDimType::kType5;
  return OneDimType::kOther;
}

template OneDimType classify_1d_type(const RationalParameter&);
template OneDimType classify_1d_type(const FloatParameter&);

RationalParameter ones_chain_witness(size_t ones) {
  if (ones < 2) throw std::invalid_argument("a chain needs at least two widths");
  std::vector<size_t> widths(ones, 1);
  std::vector<Rational> flat;
  for (size_t l = 0; l + 1 < ones; ++l) {
    if (l == 1) {
      flat.insert(flat.end(), {Rational(-1), Rational(1)});
    } else {
      flat.insert(flat.end(), {Rational(1), Rational(1)});
    }
  }
  return RationalParameter::from_flat(Architecture(widths), flat);
}

size_t ones_chain_expected(size_t ones) {
  if (ones < 2) throw std::invalid_argument("a chain needs at least two widths");
  return std::min<size_t>(ones, 4);
}

namespace {

RationalParameter prefix(const RationalParameter& p, size_t layers) {
  std::vector<size_t> widths(p.arch().widths().begin(),
                             p.arch().widths().begin() + static_cast<long>(layers) + 1);
  std::vector<Matrix<Rational>> mats(p.layers().begin(),
                                     p.layers().begin() + static_cast<long>(layers));
  return RationalParameter(Architecture(widths), std::move(mats));
}

struct ChainTrial {
  std::optional<size_t> dim;
  std::vector<std::string> types;
  bool closure_ok = true;
};

ChainTrial chain_trial(const RationalParameter& p, std::uint64_t seed) {
  ChainTrial out;
  for (size_t k = 1; k <= p.depth(); ++k) {
    const OneDimType t = classify_1d_type(prefix(p, k));
    out.types.push_back(to_string(t));
    if (t == OneDimType::kOther) out.closure_ok = false;
  }
  try {
    out.dim = dimension_of(p, seed);
  } catch (const NonOrdinarySuspected&) {
  }
  return out;
}

}  // namespace

ExperimentReport ones_chain_dim(size_t ones, size_t trials, std::uint64_t seed) {
  const std::vector<size_t> widths(ones, 1);
  if (ones < 2) throw std::invalid_argument("a chain needs at least two widths");
  const Architecture arch(widths);
  ExperimentReport r;
  r.name = "ones-chain";
  r.seed = seed;
  r.trials = trials;
  r.config = {{"widths", widths_json(arch)}, {"entries", "dyadic [-2,2] / 64"}};
  const size_t expected = ones_chain_expected(ones);
  const size_t bound = upper_bound(arch);

  const auto results = parallel_map<ChainTrial>(trials, [&](size_t t) {
    Rng rng(seed, t);
    return chain_trial(random_parameter<Rational>(arch, rng), trial_seed(seed, t));
  });
  const ChainTrial witness = chain_trial(ones_chain_witness(ones), seed);

  size_t best_random = 0, violations = 0, closure_failures = 0;
  for (size_t t = 0; t < results.size(); ++t) {
    const auto& res = results[t];
    json rec = {{"trial", t}, {"types", res.types}};
    if (res.dim) {
      rec["dim"] = *res.dim;
      best_random = std::max(best_random, *res.dim);
      violations += *res.dim > bound;
    }
    closure_failures += !res.closure_ok;
    r.records.push_back(std::move(rec));
  }
  const size_t witness_dim = witness.dim.value_or(0);
  closure_failures += !witness.closure_ok;
  const size_t best = std::max(best_random, witness_dim);
  r.summary = {{"max", best},
               {"max_random", best_random},
               {"witness_dim", witness_dim},
               {"witness_types", witness.types},
               {"expected", expected},
               {"formula_bound", bound},
               {"bound_violations", violations},
               {"type_closure_failures", closure_failures}};
  if (violations || closure_failures || best > expected) {
    r.verdict = "violated";
  } else {
    r.verdict = best == expected ? "consistent" : "below_expected";
  }
  return r;
}

ExperimentReport stably_unactivated_frequency(const Architecture& arch, size_t trials,
                                              std::uint64_t seed) {
  ExperimentReport r;
  r.name = "stably-unactivated";
  r.seed = seed;
  r.trials = trials;
  r.config = {{"widths", widths_json(arch)}, {"entries", "uniform [-1,1]"}};
  // counts[l][i] for layers l >= 1 (0-based)
  std::vector<std::vector<size_t>> counts(arch.depth());
  for (size_t l = 0; l < arch.depth(); ++l) counts[l].assign(arch.width(l + 1), 0);
  size_t any = 0;
  for (size_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    std::vector<double> flat(param_dim(arch));
    for (auto& v : flat) v = rng.uniform(-1.0, 1.0);
    const auto p = FloatParameter::from_flat(arch, flat);
    bool hit = false;
    for (size_t l = 1; l < arch.depth(); ++l)
      for (size_t i = 0; i < arch.width(l + 1); ++i) {
        if (stably_unactivated_sufficient(p, l, i)) {
          ++counts[l][i];
          hit = true;
        }
      }
    any += hit;
  }
  if (trials == 0) {
    r.verdict = "empty";
    return r;
  }
  const double n = static_cast<double>(trials);
  double max_z = 0;
  double none_expected = 1;
  bool within = true;
  for (size_t l = 1; l < arch.depth(); ++l) {
    const double q = std::ldexp(1.0, -static_cast<int>(1 + arch.width(l)));
    const double se = std::sqrt(q * (1 - q) / n);
    for (size_t i = 0; i < arch.width(l + 1); ++i) {
      const double freq = static_cast<double>(counts[l][i]) / n;
      const double z = (freq - q) / se;
      max_z = std::max(max_z, std::abs(z));
      within = within && std::abs(z) <= 3.0;
      r.records.push_back({{"layer", l},
                           {"neuron", i},
                           {"fan_in", arch.width(l)},
                           {"count", counts[l][i]},
                           {"frequency", freq},
                           {"expected", q},
                           {"std_err", se},
                           {"z", z}});
      none_expected *= 1 - q;
    }
  }
  r.summary = {{"max_abs_z", max_z},
               {"network_frequency", static_cast<double>(any) / n},
               {"network_expected", 1 - none_expected}};
  r.verdict = within ? "within_3_std_err" : "outside_3_std_err";
  return r;
}

RationalParameter depth1_parameter(size_t n1, size_t n2) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("depth1_parameter: widths must be >= 1");
  Matrix<Rational> a(n2, n1 + 1);
  if (n2 <= n1 + 1) {
    // Simplex {x >= 0, sum x <= 1}: facets -x_i >= 0 ... and sum x - 1.
    for (size_t i = 0; i < n2; ++i) {
      if (i < n1) {
        a(i, i) = -1;
      } else {
        for (size_t c = 0; c < n1; ++c) a(i, c) = 1;
        a(i, n1) = -1;
      }
    }
  } else if (n2 <= 2 * n1) {
    // Cube [-1, 1]^{n1}: facets +-x_i - 1.
    for (size_t i = 0; i < n2; ++i) {
      a(i, i % n1) = i < n1 ? 1 : -1;
      a(i, n1) = -1;
    }
  } else {
    throw std::invalid_argument("depth1_parameter: n2 = " + std::to_string(n2) +
                                " exceeds the 2*n1 facets available");
  }
  return RationalParameter(Architecture({n1, n2}), {std::move(a)});
}

ExperimentReport depth1_witness(size_t n1, size_t n2, std::uint64_t seed, size_t samples) {
  const RationalParameter p = depth1_parameter(n1, n2);
  ExperimentReport r;
  r.name = "depth1";
  r.seed = seed;
  r.trials = 1;
  r.config = {{"widths", widths_json(p.arch())}, {"samples", samples}, {"box", {-10, 10}}};
  const auto atlas = discover_regions(p, Box{}, samples, seed);
  const auto ds = decisive_set(p, atlas);
  const size_t dim = batch_dim(p, ds.points).value;
  size_t single_side = 0;
  for (const auto& [label, reps] : atlas.regions) {
    size_t on = 0;
    for (auto v : label.layers[0]) on += v > 0;
    single_side += on == 1;
    r.records.push_back({{"label", label.to_string()}, {"representatives", reps.size()}});
  }
  const size_t expected = n2 * (n1 + 1);
  r.summary = {{"dim", dim},
               {"expected", expected},
               {"param_dim", param_dim(p.arch())},
               {"regions", atlas.regions.size()},
               {"single_positive_side_regions", single_side}};
  r.verdict = dim == expected ? "attained" : "not_attained";
  return r;
}

ExperimentReport nonordinary_demo(const Rational& eps) {
  ExperimentReport r;
  r.name = "nonordinary";
  r.config = {{"eps", to_string(eps)}, {"widths", {1, 1}}};
  const Architecture arch({1, 1});
  auto quotients = [&](const std::vector<Rational>& s, const Rational& x, size_t dir) {
    std::vector<Rational> up = s, down = s;
    up[dir] += eps;
    down[dir] -= eps;
    const std::vector<Rational> in{x};
    const auto f = [&](const std::vector<Rational>& q) {
      return evaluate(RationalParameter::from_flat(arch, q), std::span<const Rational>(in))[0];
    };
    const Rational f0 = f(s);
    return std::pair<Rational, Rational>((f(up) - f0) / eps, (f0 - f(down)) / eps);
  };
  bool all_disagree = true;
  const std::vector<Rational> zero{0, 0};
  for (long xi : {-2, -1, 1, 2, 0}) {
    const Rational x(xi);
    const size_t dir = xi == 0 ? 1 : 0;
    const auto [right, left] = quotients(zero, x, dir);
    const bool disagree = right != left;
    all_disagree = all_disagree && disagree;
    r.records.push_back({{"x", xi},
                         {"direction", dir == 0 ? "a" : "b"},
                         {"right", to_string(right)},
                         {"left", to_string(left)},
                         {"disagree", disagree}});
  }
  const auto [cr, cl] = quotients({1, 1}, Rational(1), 0);
  const bool control_ok = cr == cl;
  r.trials = r.records.size();
  r.summary = {{"all_disagree", all_disagree},
               {"control", {{"s", {1, 1}}, {"x", 1}, {"right", to_string(cr)},
                            {"left", to_string(cl)}, {"agree", control_ok}}}};
  r.verdict = all_disagree && control_ok ? "confirmed" : "not_confirmed";
  return r;
}

ExperimentReport semicontinuity_probe(const Architecture& arch, size_t trials,
                                      const std::vector<double>& radii, std::uint64_t seed,
                                      size_t perturbations,
                                      std::optional<RationalParameter> base) {
  if (radii.empty()) throw std::invalid_argument("semicontinuity_probe: no radii");
  if (base && !(base->arch() == arch)) {
    throw std::invalid_argument("semicontinuity_probe: base parameter architecture mismatch");
  }
  ExperimentReport r;
  r.name = "semicontinuity";
  r.seed = seed;
  r.trials = trials;
  r.config = {{"widths", widths_json(arch)},
              {"radii", radii},
              {"perturbations", perturbations},
              {"fixed_base", base.has_value()}};
  const size_t bound = upper_bound(arch);

  struct Trial {
    json record;
    bool counted = false;
    bool ok = false;
    size_t violations = 0;
  };
  const auto results = parallel_map<Trial>(trials, [&](size_t t) {
    Trial out;
    Rng rng(seed, t);
    const RationalParameter p = base ? *base : random_parameter<Rational>(arch, rng);
    size_t base_dim;
    try {
      base_dim = dimension_of(p, trial_seed(seed, t));
    } catch (const NonOrdinarySuspected& e) {
      out.record = {{"trial", t}, {"error", e.what()}};
      return out;
    }
    out.violations += base_dim > bound;
    json mins = json::array();
    size_t last_min = base_dim;
    const std::vector<Rational> s = p.flatten();
    for (size_t ri = 0; ri < radii.size(); ++ri) {
      const Rational radius = rational_from_double(radii[ri]);
      std::optional<size_t> min_dim;
      for (size_t k = 0; k < perturbations; ++k) {
        Rng prng(trial_seed(seed, t), ri * perturbations + k);
        std::vector<Rational> q = s;
        for (auto& v : q) v += radius * ratio(prng.uniform_int(-1024, 1024), 1024);
        try {
          const size_t d = dimension_of(RationalParameter::from_flat(arch, q), prng.next());
          out.violations += d > bound;
          min_dim = std::min(min_dim.value_or(d), d);
        } catch (const NonOrdinarySuspected&) {
        }
      }
      mins.push_back(min_dim ? json(*min_dim) : json(nullptr));
      if (min_dim) last_min = *min_dim;
    }
    out.counted = true;
    out.ok = last_min >= base_dim;
    out.record = {{"trial", t}, {"base_dim", base_dim}, {"min_dims", mins}, {"ok", out.ok}};
    return out;
  });

  size_t counted = 0, ok = 0, violations = 0;
  json exceptions = json::array();
  for (const auto& res : results) {
    r.records.push_back(res.record);
    counted += res.counted;
    ok += res.ok;
    violations += res.violations;
    if (res.counted && !res.ok) exceptions.push_back(res.record["trial"]);
  }
  const double frac = counted ? static_cast<double>(ok) / static_cast<double>(counted) : 0.0;
  r.summary = {{"base_points", counted},
               {"ok_at_smallest_radius", ok},
               {"fraction_ok", frac},
               {"exceptions", exceptions},
               {"bound_violations", violations}};
  r.verdict = violations ? "bound_violated" : (counted && frac >= 0.99 ? "consistent" : "violated");
  return r;
}

json to_json(const ExperimentReport& r) {
  return {{"name", r.name},     {"seed", r.seed},       {"trials", r.trials},
          {"config", r.config}, {"records", r.records}, {"summary", r.summary},
          {"verdict", r.verdict}};
}

}  // namespace fundim
