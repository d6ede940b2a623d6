#pragma once

// Randomized and constructive experiments on bounds, tightness, stable
// unactivation, non-ordinary parameters and semicontinuity. Every experiment
// is a pure function of its arguments; trial t draws from Rng(seed, t).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fundim/funcdim.hpp"
#include "fundim/random.hpp"

namespace fundim {

struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  size_t trials = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<nlohmann::json> records;
  nlohmann::json summary = nlohmann::json::object();
  std::string verdict;
};

// Random dyadic parameter with entries in [-bound, bound], denominator 64.
template <class T>
Parameter<T> random_parameter(const Architecture& arch, Rng& rng, std::int64_t bound = 2);

bool is_narrowing(const Architecture& arch);

// Random search for a parameter attaining upper_bound(arch). The verdict is
// "attained" or "inconclusive"; "bound_violated" flags a dimension above the
// bound.
ExperimentReport tightness_search(const Architecture& arch, size_t trials, std::uint64_t seed);

// Computes functional_dim (random saturation, exact) for random parameters
// and counts results above upper_bound(arch).
ExperimentReport upper_bound_check(const Architecture& arch, size_t trials, std::uint64_t seed);

enum class OneDimType { kType1 = 1, kType2, kType3, kType4, kType5, kOther };

std::string to_string(OneDimType t);

// Shape of the function of an all-ones network by the slope signs of its
// pieces after merging equal neighbours: [0] 1, [0,+] 2, [-,0] 3, [0,+,0] 4,
// [0,-,0] 5.
template <class T>
OneDimType classify_1d_type(const Parameter<T>& p);

// Witness for (1,...,1) with `ones` widths: sigma(x+1), then
// sigma(-y+1), then sigma(y+1) for every further layer.
RationalParameter ones_chain_witness(size_t ones);

// Expected supremum of the functional dimension for a chain of `ones` ones.
size_t ones_chain_expected(size_t ones);

ExperimentReport ones_chain_dim(size_t ones, size_t trials, std::uint64_t seed);

// Sufficient sign condition frequency per neuron of layers >= 2 with entries
// uniform on [-1, 1].
ExperimentReport stably_unactivated_frequency(const Architecture& arch, size_t trials,
                                              std::uint64_t seed);

// Arch (n1, n2) whose rows are outward facet normals of a simplex
// (n2 <= n1 + 1) or a cube (n2 <= 2 n1).
RationalParameter depth1_parameter(size_t n1, size_t n2);

ExperimentReport depth1_witness(size_t n1, size_t n2, std::uint64_t seed = 0,
                                size_t samples = 4000);

// One-sided difference quotients of the (1,1) network at s = (0, 0).
ExperimentReport nonordinary_demo(const Rational& eps = Rational(1, 1000));

// For base parameters p (given, or random when empty) and each radius, the
// minimum functional dimension over random perturbations of size <= radius.
ExperimentReport semicontinuity_probe(const Architecture& arch, size_t trials,
                                      const std::vector<double>& radii, std::uint64_t seed,
                                      size_t perturbations = 20,
                                      std::optional<RationalParameter> base = std::nullopt);

nlohmann::json to_json(const ExperimentReport& r);

}  // namespace fundim
