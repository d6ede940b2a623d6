#pragma once

// Parameter-space symmetries generated by neuron permutations and positive
// rescalings, and the fiber examples built on them.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fundim/funcdim.hpp"

namespace fundim {

// Swaps neurons j and k of hidden layer `layer` (rows of layers()[layer],
// columns of layers()[layer + 1]).
struct Permutation {
  size_t layer = 0;
  size_t j = 0;
  size_t k = 0;
};

// Multiplies row `neuron` of layers()[layer] (bias included) by factor and
// column `neuron` of layers()[layer + 1] by 1 / factor.
struct Rescale {
  size_t layer = 0;
  size_t neuron = 0;
  Rational factor{1};
};

using SymmetryGenerator = std::variant<Permutation, Rescale>;

class SymmetryElement {
 public:
  SymmetryElement() = default;
  explicit SymmetryElement(std::vector<SymmetryGenerator> steps);

  static SymmetryElement permutation(size_t layer, size_t j, size_t k);
  static SymmetryElement rescale(size_t layer, size_t neuron, Rational factor);

  const std::vector<SymmetryGenerator>& steps() const { return steps_; }
  // this followed by other.
  SymmetryElement then(const SymmetryElement& other) const;
  SymmetryElement inverse() const;
  std::string to_string() const;

 private:
  std::vector<SymmetryGenerator> steps_;  // applied first to last
};

template <class T>
Parameter<T> apply_symmetry(const SymmetryElement& g, const Parameter<T>& p);

// Random element with `length` generators valid for arch; rescale factors
// are k / 8 with k in [1, 32].
SymmetryElement random_symmetry(const Architecture& arch, size_t length, std::uint64_t seed,
                                std::uint64_t stream = 0);

// Regular grid with points_per_axis points per axis over [lo, hi]^{n_0}.
template <class T>
Batch<T> input_grid(size_t n0, size_t points_per_axis = 41, std::int64_t lo = -10,
                    std::int64_t hi = 10);

// rho(p) and rho(g p) agree on every sample point: exactly in rational mode,
// within tol in float mode.
template <class T>
bool verify_unmarked_invariance(const Parameter<T>& p, const SymmetryElement& g,
                                const Batch<T>& sample, double tol = 1e-9);

enum class FiberBranch { kBranch1, kBranch2, kNotInFiber };

std::string_view to_string(FiberBranch b);

// Parameters (a, b, c, d, e, f, g) of arch (1,2,1) realizing x -> |x|:
// b = d = g = 0, e > 0, f > 0 and (ea, fc) = (1, -1) or (-1, 1).
template <class T>
FiberBranch fiber_membership_absvalue(const Parameter<T>& p);

// True iff forward(p, x)[0] == |x| on every grid point.
template <class T>
bool realizes_abs(const Parameter<T>& p, const Batch<T>& grid);

struct NontransitivityReport {
  bool both_constant_zero = false;
  Rational bump_value;          // rho(s1 + (0, r/2))(0)
  size_t s2_perturbations = 0;  // sampled with |delta|_inf <= 1/4
  size_t s2_nonzero = 0;        // perturbations nonzero somewhere on |x| <= 1/2
  bool holds() const { return both_constant_zero && bump_value > 0 && s2_nonzero == 0; }
};

// s1 = (0, 0) and s2 = (0, -1) in arch (1,1) realize the same function, but
// s1 has perturbations that are positive near 0 while s2 has none.
NontransitivityReport nontransitivity_demo(std::uint64_t seed = 0, size_t perturbations = 1000,
                                           const Rational& radius = Rational(1, 5));

}  // namespace fundim
