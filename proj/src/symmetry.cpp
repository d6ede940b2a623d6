#include "fundim/symmetry.hpp"

#include <sstream>
#include <stdexcept>

#include "fundim/random.hpp"

namespace fundim {

SymmetryElement::SymmetryElement(std::vector<SymmetryGenerator> steps)
    : steps_(std::move(steps)) {
  for (const auto& s : steps_) {
    if (const auto* r = std::get_if<Rescale>(&s); r && !(r->factor > 0)) {
      throw std::invalid_argument("rescale factor must be strictly positive");
    }
    if (const auto* q = std::get_if<Permutation>(&s); q && q->j == q->k) {
      throw std::invalid_argument("permutation indices must be distinct");
    }
  }
}

SymmetryElement SymmetryElement::permutation(size_t layer, size_t j, size_t k) {
  return SymmetryElement({Permutation{layer, j, k}});
}

SymmetryElement SymmetryElement::rescale(size_t layer, size_t neuron, Rational factor) {
  return SymmetryElement({Rescale{layer, neuron, std::move(factor)}});
}

SymmetryElement SymmetryElement::then(const SymmetryElement& other) const {
  std::vector<SymmetryGenerator> steps = steps_;
  steps.insert(steps.end(), other.steps_.begin(), other.steps_.end());
  return SymmetryElement(std::move(steps));
}

SymmetryElement SymmetryElement::inverse() const {
  std::vector<SymmetryGenerator> steps;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    if (const auto* r = std::get_if<Rescale>(&*it)) {
      steps.push_back(Rescale{r->layer, r->neuron, 1 / r->factor});
    } else {
      steps.push_back(*it);
    }
  }
  return SymmetryElement(std::move(steps));
}

std::string SymmetryElement::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < steps_.size(); ++i) {
    if (i) os << " ; ";
    if (const auto* q = std::get_if<Permutation>(&steps_[i])) {
      os << "perm(layer=" << q->layer << "," << q->j << "<->" << q->k << ")";
    } else {
      const auto& r = std::get<Rescale>(steps_[i]);
      os << "rescale(layer=" << r.layer << ",neuron=" << r.neuron
         << ",c=" << fundim::to_string(r.factor) << ")";
    }
  }
  return os.str();
}

namespace {

void check_hidden(const Architecture& arch, size_t layer, size_t neuron) {
  if (layer + 1 >= arch.depth()) {
    throw std::invalid_argument("symmetry layer " + std::to_string(layer) +
                                " is not a hidden layer of " + to_string(arch));
  }
  if (neuron >= arch.width(layer + 1)) {
    throw std::invalid_argument("symmetry neuron " + std::to_string(neuron) +
                                " out of range for layer " + std::to_string(layer));
  }
}

}  // namespace

template <class T>
Parameter<T> apply_symmetry(const SymmetryElement& g, const Parameter<T>& p) {
  std::vector<Matrix<T>> layers = p.layers();
  for (const auto& step : g.steps()) {
    if (const auto* q = std::get_if<Permutation>(&step)) {
      check_hidden(p.arch(), q->layer, q->j);
      check_hidden(p.arch(), q->layer, q->k);
      auto& a = layers[q->layer];
      auto& next = layers[q->layer + 1];
      for (size_t c = 0; c < a.cols(); ++c) std::swap(a(q->j, c), a(q->k, c));
      for (size_t r = 0; r < next.rows(); ++r) std::swap(next(r, q->j), next(r, q->k));
    } else {
      const auto& s = std::get<Rescale>(step);
      check_hidden(p.arch(), s.layer, s.neuron);
      const T c = ScalarTraits<T>::from_rational(s.factor);
      const T inv = ScalarTraits<T>::from_rational(1 / s.factor);
      auto& a = layers[s.layer];
      auto& next = layers[s.layer + 1];
      for (auto& v : a.row(s.neuron)) v *= c;
      for (size_t r = 0; r < next.rows(); ++r) next(r, s.neuron) *= inv;
    }
  }
  return Parameter<T>(p.arch(), std::move(layers));
}

SymmetryElement random_symmetry(const Architecture& arch, size_t length, std::uint64_t seed,
                                std::uint64_t stream) {
  if (arch.depth() < 2) throw std::invalid_argument("architecture has no hidden layer");
  Rng rng(seed, stream);
  std::vector<SymmetryGenerator> steps;
  while (steps.size() < length) {
    const auto layer = static_cast<size_t>(rng.uniform_int(0, arch.depth() - 2));
    const auto width = static_cast<std::int64_t>(arch.width(layer + 1));
    const bool permute = width >= 2 && rng.uniform_int(0, 1) == 0;
    if (permute) {
      const auto j = static_cast<size_t>(rng.uniform_int(0, width - 1));
      auto k = static_cast<size_t>(rng.uniform_int(0, width - 2));
      if (k >= j) ++k;
      steps.push_back(Permutation{layer, j, k});
    } else {
      const auto neuron = static_cast<size_t>(rng.uniform_int(0, width - 1));
      steps.push_back(Rescale{layer, neuron, ratio(rng.uniform_int(1, 32), 8)});
    }
  }
  for (auto& s : steps) {
    if (auto* r = std::get_if<Rescale>(&s)) r->factor.canonicalize();
  }
  return SymmetryElement(std::move(steps));
}

template <class T>
Batch<T> input_grid(size_t n0, size_t points_per_axis, std::int64_t lo, std::int64_t hi) {
  if (points_per_axis < 2) throw std::invalid_argument("input_grid: need >= 2 points per axis");
  if (lo >= hi) throw std::invalid_argument("input_grid: empty range");
  double total = 1;
  for (size_t i = 0; i < n0; ++i) total *= static_cast<double>(points_per_axis);
  if (total > 2e6) throw std::invalid_argument("input_grid: too many points");
  std::vector<T> axis;
  const Rational step = ratio(hi - lo, static_cast<long>(points_per_axis - 1));
  for (size_t k = 0; k < points_per_axis; ++k) {
    axis.push_back(ScalarTraits<T>::from_rational(Rational(lo) + step * static_cast<long>(k)));
  }
  Batch<T> grid{{}};
  for (size_t d = 0; d < n0; ++d) {
    Batch<T> next;
    for (const auto& prefix : grid)
      for (const auto& v : axis) {
        auto pt = prefix;
        pt.push_back(v);
        next.push_back(std::move(pt));
      }
    grid = std::move(next);
  }
  return grid;
}

template <class T>
bool verify_unmarked_invariance(const Parameter<T>& p, const SymmetryElement& g,
                                const Batch<T>& sample, double tol) {
  const Parameter<T> q = apply_symmetry(g, p);
  for (const auto& x : sample) {
    const auto a = evaluate(p, std::span<const T>(x));
    const auto b = evaluate(q, std::span<const T>(x));
    for (size_t r = 0; r < a.size(); ++r) {
      if constexpr (ScalarTraits<T>::kExact) {
        if (a[r] != b[r]) return false;
      } else {
        if (std::abs(a[r] - b[r]) > tol * (1.0 + std::abs(a[r]))) return false;
      }
    }
  }
  return true;
}

std::string_view to_string(FiberBranch b) {
  switch (b) {
    case FiberBranch::kBranch1:
      return "Branch1";
    case FiberBranch::kBranch2:
      return "Branch2";
    case FiberBranch::kNotInFiber:
      return "NotInFiber";
  }
  return "NotInFiber";
}

template <class T>
bool realizes_abs(const Parameter<T>& p, const Batch<T>& grid) {
  for (const auto& x : grid) {
    const T expected = x.at(0) < 0 ? T(-x[0]) : x[0];
    if (evaluate(p, std::span<const T>(x)).at(0) != expected) return false;
  }
  return true;
}

template <class T>
FiberBranch fiber_membership_absvalue(const Parameter<T>& p) {
  if (!(p.arch() == Architecture({1, 2, 1}))) {
    throw std::invalid_argument("fiber_membership_absvalue requires architecture (1,2,1)");
  }
  const std::vector<T> s = p.flatten();
  const T &a = s[0], &b = s[1], &c = s[2], &d = s[3], &e = s[4], &f = s[5], &g = s[6];
  FiberBranch branch = FiberBranch::kNotInFiber;
  if (b == 0 && d == 0 && g == 0 && e > 0 && f > 0) {
    const T ea = e * a;
    const T fc = f * c;
    if (ea == 1 && fc == -1) branch = FiberBranch::kBranch1;
    if (ea == -1 && fc == 1) branch = FiberBranch::kBranch2;
  }
  if (branch != FiberBranch::kNotInFiber && !realizes_abs(p, input_grid<T>(1))) {
    throw std::logic_error("fiber member does not realize |x| on the grid");
  }
  return branch;
}

NontransitivityReport nontransitivity_demo(std::uint64_t seed, size_t perturbations,
                                           const Rational& radius) {
  const Architecture arch({1, 1});
  const auto s1 = RationalParameter::from_flat(arch, std::vector<Rational>{0, 0});
  const auto s2 = RationalParameter::from_flat(arch, std::vector<Rational>{0, -1});
  NontransitivityReport report;
  const Batch<Rational> grid = input_grid<Rational>(1);
  report.both_constant_zero = true;
  for (const auto& x : grid) {
    report.both_constant_zero = report.both_constant_zero &&
                                evaluate(s1, std::span<const Rational>(x))[0] == 0 &&
                                evaluate(s2, std::span<const Rational>(x))[0] == 0;
  }
  const auto bumped = RationalParameter::from_flat(arch, std::vector<Rational>{0, radius / 2});
  const std::vector<Rational> origin{0};
  report.bump_value = evaluate(bumped, std::span<const Rational>(origin))[0];

  // Inputs on |x| <= 1/2 at resolution 1/64.
  Batch<Rational> near;
  for (long k = -32; k <= 32; ++k) near.push_back({ratio(k, 64)});
  for (size_t t = 0; t < perturbations; ++t) {
    Rng rng(seed, t);
    std::vector<Rational> s{ratio(rng.uniform_int(-256, 256), 1024),
                            Rational(-1) + ratio(rng.uniform_int(-256, 256), 1024)};
    const auto q = RationalParameter::from_flat(arch, s);
    ++report.s2_perturbations;
    for (const auto& x : near) {
      if (evaluate(q, std::span<const Rational>(x))[0] != 0) {
        ++report.s2_nonzero;
        break;
      }
    }
  }
  return report;
}

#define FUNDIM_INSTANTIATE_SYMMETRY(T)                                                         \
  template Parameter<T> apply_symmetry(const SymmetryElement&, const Parameter<T>&);            \
  template Batch<T> input_grid(size_t, size_t, std::int64_t, std::int64_t);                     \
  template bool verify_unmarked_invariance(const Parameter<T>&, const SymmetryElement&,         \
                                           const Batch<T>&, double);                            \
  template FiberBranch fiber_membership_absvalue(const Parameter<T>&);                          \
  template bool realizes_abs(const Parameter<T>&, const Batch<T>&);

FUNDIM_INSTANTIATE_SYMMETRY(Rational)
FUNDIM_INSTANTIATE_SYMMETRY(double)

}  // namespace fundim
