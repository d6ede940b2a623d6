#include "fundim/pwl_complex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fundim/errors.hpp"
#include "fundim/random.hpp"

namespace fundim {

namespace {

// Zero test for derived quantities (slopes, values at breakpoints).
template <class T>
bool near_zero(const T& v, double tol = kDefaultMergeTol) {
  if constexpr (ScalarTraits<T>::kExact) {
    return sgn(v) == 0;
  } else {
    return std::abs(v) <= tol;
  }
}

template <class T>
bool identically_zero(const Affine1D<T>& f) {
  return near_zero(f.slope) && near_zero(f.intercept);
}

template <class T>
std::string scalar_string(const T& v) {
  if constexpr (ScalarTraits<T>::kExact) {
    return to_string(v);
  } else {
    std::ostringstream os;
    os << v;
    return os.str();
  }
}

template <class T>
struct WorkCell {
  std::optional<T> lo, hi;
  std::vector<std::vector<Affine1D<T>>> pre;
  std::vector<std::vector<std::int8_t>> label;
  std::vector<Affine1D<T>> post;
};

template <class T>
T interval_representative(const std::optional<T>& lo, const std::optional<T>& hi) {
  if (lo && hi) return (*lo + *hi) / 2;
  if (lo) return *lo + 1;
  if (hi) return *hi - 1;
  return T(0);
}

}  // namespace

template <class T>
T cell_representative(const Cell1D<T>& cell) {
  return interval_representative(cell.lo, cell.hi);
}

template <class T>
Complex1D<T> complex_1d(const Parameter<T>& p, double zero_tol, double merge_tol) {
  if (p.arch().input_dim() != 1) {
    throw std::invalid_argument("complex_1d requires input dimension 1");
  }
  Complex1D<T> out;
  std::vector<WorkCell<T>> cells(1);
  cells[0].post = {Affine1D<T>{T(1), T(0)}};

  for (size_t l = 0; l < p.depth(); ++l) {
    const Matrix<T>& a = p.layer(l);
    const size_t n_in = a.cols() - 1;
    std::vector<WorkCell<T>> next;
    for (const auto& cell : cells) {
      std::vector<Affine1D<T>> forms(a.rows());
      for (size_t i = 0; i < a.rows(); ++i) {
        Affine1D<T> f{T(0), a(i, n_in)};
        for (size_t c = 0; c < n_in; ++c) {
          if (a(i, c) == 0) continue;
          f.slope += a(i, c) * cell.post[c].slope;
          f.intercept += a(i, c) * cell.post[c].intercept;
        }
        forms[i] = f;
      }

      std::vector<T> roots;
      for (const auto& f : forms) {
        if (near_zero(f.slope, 0.0)) continue;
        T r = -f.intercept / f.slope;
        if ((cell.lo && !(*cell.lo < r)) || (cell.hi && !(r < *cell.hi))) continue;
        if constexpr (!ScalarTraits<T>::kExact) {
          if ((cell.lo && r - *cell.lo <= merge_tol) || (cell.hi && *cell.hi - r <= merge_tol)) {
            out.warnings.push_back("root " + scalar_string(r) +
                                   " merged with an existing breakpoint");
            continue;
          }
        }
        roots.push_back(std::move(r));
      }
      std::sort(roots.begin(), roots.end());
      std::vector<T> distinct;
      for (auto& r : roots) {
        if (!distinct.empty()) {
          if constexpr (ScalarTraits<T>::kExact) {
            if (r == distinct.back()) continue;
          } else {
            if (r - distinct.back() <= merge_tol) {
              if (r != distinct.back()) {
                out.warnings.push_back("near-coincident roots merged at " +
                                       scalar_string(distinct.back()));
              }
              continue;
            }
          }
        }
        distinct.push_back(std::move(r));
      }

      std::optional<T> lo = cell.lo;
      for (size_t k = 0; k <= distinct.size(); ++k) {
        std::optional<T> hi = k < distinct.size() ? std::optional<T>(distinct[k]) : cell.hi;
        WorkCell<T> sub;
        sub.lo = lo;
        sub.hi = hi;
        sub.pre = cell.pre;
        sub.pre.push_back(forms);
        sub.label = cell.label;
        const T rep = interval_representative(lo, hi);
        std::vector<std::int8_t> signs(forms.size());
        sub.post.resize(forms.size());
        for (size_t i = 0; i < forms.size(); ++i) {
          signs[i] = static_cast<std::int8_t>(
              identically_zero(forms[i]) ? 0 : ScalarTraits<T>::sign(forms[i].at(rep), zero_tol));
          if (signs[i] > 0) sub.post[i] = forms[i];
        }
        sub.label.push_back(std::move(signs));
        next.push_back(std::move(sub));
        lo = hi;
      }
    }
    cells = std::move(next);
  }

  for (size_t k = 0; k < cells.size(); ++k) {
    auto& wc = cells[k];
    if (k > 0) out.breakpoints.push_back(*wc.lo);
    Cell1D<T> cell;
    cell.lo = std::move(wc.lo);
    cell.hi = std::move(wc.hi);
    cell.label.layers = std::move(wc.label);
    cell.pre = std::move(wc.pre);
    cell.output = std::move(wc.post);
    out.cells.push_back(std::move(cell));
  }
  for (const auto& b : out.breakpoints) {
    const std::vector<T> x{b};
    out.vertex_labels.push_back(ternary_label(p, std::span<const T>(x), zero_tol));
  }
  return out;
}

namespace {

template <class T>
std::pair<T, T> two_points(const Cell1D<T>& cell, bool single_cell) {
  if (single_cell && !cell.lo && !cell.hi) return {T(1), T(2)};
  if (cell.lo && cell.hi) {
    const T width = *cell.hi - *cell.lo;
    return {*cell.lo + width / 3, *cell.lo + 2 * width / 3};
  }
  if (cell.lo) return {*cell.lo + 1, *cell.lo + 2};
  if (cell.hi) return {*cell.hi - 1, *cell.hi - 2};
  return {T(1), T(2)};
}

template <class T>
bool point_ok(const Parameter<T>& p, const std::vector<T>& x, SmoothnessPolicy policy,
              double zero_tol) {
  const Smoothness s = smoothness(p, std::span<const T>(x), zero_tol);
  return s == Smoothness::kSmoothNoZeros ||
         (policy == SmoothnessPolicy::kPermissive && s == Smoothness::kSmoothStableDead);
}

}  // namespace

template <class T>
DecisiveSet<T> decisive_set(const Parameter<T>& p, const Complex1D<T>& c,
                            SmoothnessPolicy policy, double zero_tol) {
  DecisiveSet<T> ds;
  for (size_t k = 0; k < c.cells.size(); ++k) {
    const auto& cell = c.cells[k];
    auto [u, v] = two_points(cell, c.cells.size() == 1);
    std::vector<T> x1{u}, x2{v};
    const bool strict_ok = !cell.label.has_zero();
    if ((strict_ok || policy == SmoothnessPolicy::kPermissive) &&
        point_ok(p, x1, policy, zero_tol) && point_ok(p, x2, policy, zero_tol)) {
      ds.points.push_back(std::move(x1));
      ds.points.push_back(std::move(x2));
      ds.cell_of_point.push_back(k);
      ds.cell_of_point.push_back(k);
    } else {
      ds.skipped.push_back(k);
    }
  }
  return ds;
}

namespace {

template <class T>
class AffineIndependence;

template <>
class AffineIndependence<Rational> {
 public:
  explicit AffineIndependence(size_t n) : basis_(n + 1) {}
  bool add(const std::vector<Rational>& x) {
    std::vector<Rational> row = x;
    row.emplace_back(1);
    return basis_.add(row);
  }

 private:
  RationalRowBasis basis_;
};

template <>
class AffineIndependence<double> {
 public:
  explicit AffineIndependence(size_t n) : rows_(0, n + 1) {}
  bool add(const std::vector<double>& x) {
    FloatMatrix candidate = rows_;
    std::vector<double> row = x;
    row.push_back(1.0);
    candidate.append_row(row);
    if (rank_numeric(candidate) <= rows_.rows()) return false;
    rows_ = std::move(candidate);
    return true;
  }

 private:
  FloatMatrix rows_;
};

template <class T>
T sample_coordinate(Rng& rng, const Box& box) {
  if constexpr (ScalarTraits<T>::kExact) {
    const auto lo = static_cast<std::int64_t>(std::ceil(box.lo * kGridDenominator));
    const auto hi = static_cast<std::int64_t>(std::floor(box.hi * kGridDenominator));
    Rational q(static_cast<long>(rng.uniform_int(lo, hi)),
               static_cast<unsigned long>(kGridDenominator));
    q.canonicalize();
    return q;
  } else {
    return rng.uniform(box.lo, box.hi);
  }
}

}  // namespace

template <class T>
RegionAtlas<T> discover_regions(const Parameter<T>& p, Box box, size_t n_samples,
                                std::uint64_t seed, double zero_tol) {
  const size_t n0 = p.arch().input_dim();
  if (n_samples < n0 + 1) {
    throw std::invalid_argument("discover_regions: need at least n_0 + 1 samples");
  }
  if (!(box.lo < box.hi)) throw std::invalid_argument("discover_regions: empty box");
  RegionAtlas<T> atlas;
  atlas.samples = n_samples;
  std::map<TernaryLabel, AffineIndependence<T>> independence;
  Rng rng(seed);
  for (size_t s = 0; s < n_samples; ++s) {
    std::vector<T> x(n0);
    for (auto& v : x) v = sample_coordinate<T>(rng, box);
    TernaryLabel label = ternary_label(p, std::span<const T>(x), zero_tol);
    if (label.has_zero()) continue;
    auto& reps = atlas.regions[label];
    if (reps.size() > n0) continue;
    auto it = independence.try_emplace(label, n0).first;
    if (it->second.add(x)) reps.push_back(std::move(x));
  }
  if (atlas.regions.empty()) {
    throw NonOrdinarySuspected("no zero-free activation label among " +
                               std::to_string(n_samples) + " samples");
  }
  for (const auto& [label, reps] : atlas.regions) {
    if (reps.size() < n0 + 1) atlas.insufficient.push_back(label);
  }
  return atlas;
}

template <class T>
DecisiveSet<T> decisive_set(const Parameter<T>& p, const RegionAtlas<T>& atlas) {
  const size_t n0 = p.arch().input_dim();
  DecisiveSet<T> ds;
  size_t k = 0;
  for (const auto& [label, reps] : atlas.regions) {
    if (reps.size() < n0 + 1) {
      ds.skipped.push_back(k++);
      continue;
    }
    for (size_t i = 0; i <= n0; ++i) {
      ds.points.push_back(reps[i]);
      ds.cell_of_point.push_back(k);
    }
    ++k;
  }
  return ds;
}

template <class T>
SlopesValues<T> sv_map(const Parameter<T>& /*p*/, const Complex1D<T>& c) {
  SlopesValues<T> sv;
  for (const auto& cell : c.cells) {
    const T z = cell_representative(cell);
    sv.representatives.push_back({z});
    for (const auto& f : cell.output) sv.entries.push_back(f.at(z));
    for (const auto& f : cell.output) sv.entries.push_back(f.slope);
  }
  return sv;
}

template <class T>
SlopesValues<T> sv_map(const Parameter<T>& p, const RegionAtlas<T>& atlas) {
  SlopesValues<T> sv;
  const size_t n0 = p.arch().input_dim();
  for (const auto& [label, reps] : atlas.regions) {
    const auto& z = reps.front();
    sv.representatives.push_back(z);
    for (const auto& v : evaluate(p, std::span<const T>(z))) sv.entries.push_back(v);
    const MaskedLayers<T> masked = masked_affine(p, label);
    // Linear part of the composite on the region.
    Matrix<T> lin = Matrix<T>::identity(n0);
    for (const auto& a : masked.masked) {
      Matrix<T> w(a.rows(), a.cols() - 1);
      for (size_t r = 0; r < a.rows(); ++r)
        for (size_t col = 0; col + 1 < a.cols(); ++col) w(r, col) = a(r, col);
      lin = w * lin;
    }
    for (const auto& v : lin.entries()) sv.entries.push_back(v);
  }
  return sv;
}

namespace {

bool same_structure(const Complex1D<double>& a, const Complex1D<double>& b) {
  if (a.cells.size() != b.cells.size()) return false;
  for (size_t k = 0; k < a.cells.size(); ++k) {
    if (!(a.cells[k].label == b.cells[k].label)) return false;
  }
  return a.vertex_labels == b.vertex_labels;
}

// Drops breakpoints outside [-r, r]. Perturbing a zero first-layer weight by h
// creates a breakpoint near 1/h, which leaves every bounded window as h -> 0.
Complex1D<double> window(const Complex1D<double>& c, double r) {
  Complex1D<double> out;
  for (size_t k = 0; k < c.cells.size(); ++k) {
    const auto& cell = c.cells[k];
    if ((cell.hi && *cell.hi <= -r) || (cell.lo && *cell.lo >= r)) continue;
    out.cells.push_back(cell);
  }
  for (size_t k = 0; k < c.breakpoints.size(); ++k) {
    if (std::abs(c.breakpoints[k]) > r) continue;
    out.breakpoints.push_back(c.breakpoints[k]);
    out.vertex_labels.push_back(c.vertex_labels[k]);
  }
  if (!out.cells.empty()) {
    out.cells.front().lo.reset();
    out.cells.back().hi.reset();
  }
  return out;
}

std::vector<double> sv_at(const Complex1D<double>& c, const std::vector<double>& reps) {
  std::vector<double> entries;
  for (size_t k = 0; k < c.cells.size(); ++k) {
    const auto& cell = c.cells[k];
    if (!cell.contains_interior(reps[k])) {
      throw CombinatorialInstability("cell " + std::to_string(k) +
                                     " moved off its representative under perturbation");
    }
    for (const auto& f : cell.output) entries.push_back(f.at(reps[k]));
    for (const auto& f : cell.output) entries.push_back(f.slope);
  }
  return entries;
}

}  // namespace

template <class T>
RankReport<double> sv_rank(const Parameter<T>& p, double h, double tol) {
  if (p.arch().input_dim() != 1) throw std::invalid_argument("sv_rank requires input dimension 1");
  if (!(h > 0)) throw std::invalid_argument("sv_rank: step must be positive");
  const FloatParameter base = to_float(p);
  const Complex1D<double> c0 = complex_1d(base);
  std::vector<double> reps;
  for (const auto& cell : c0.cells) reps.push_back(cell_representative(cell));
  double extent = 1;
  for (double x : c0.breakpoints) extent = std::max(extent, std::abs(x));
  for (double x : reps) extent = std::max(extent, std::abs(x));
  const double escape = std::max(1 / std::sqrt(h), 4 * extent);

  const std::vector<double> s = base.flatten();
  const size_t d = s.size();
  const size_t len = c0.cells.size() * 2 * base.arch().output_dim();
  FloatMatrix jac(len, d);
  std::vector<double> shifted = s;
  for (size_t j = 0; j < d; ++j) {
    shifted[j] = s[j] + h;
    const Complex1D<double> cp =
        window(complex_1d(FloatParameter::from_flat(base.arch(), shifted)), escape);
    shifted[j] = s[j] - h;
    const Complex1D<double> cm =
        window(complex_1d(FloatParameter::from_flat(base.arch(), shifted)), escape);
    shifted[j] = s[j];
    if (!same_structure(c0, cp) || !same_structure(c0, cm)) {
      throw CombinatorialInstability("cell structure changes under a step of " +
                                     std::to_string(h) + " in parameter " + std::to_string(j));
    }
    const auto vp = sv_at(cp, reps);
    const auto vm = sv_at(cm, reps);
    for (size_t r = 0; r < len; ++r) jac(r, j) = (vp[r] - vm[r]) / (2 * h);
  }
  RankReport<double> report;
  report.value = rank_numeric(jac, tol);
  report.backend = RankBackend::kNumeric;
  report.tol = tol;
  report.strategy = "sv_rank";
  report.bound = BoundKind::kLowerBound;
  for (double z : reps) report.witness.push_back({z});
  return report;
}

namespace {

// Solves M X = B for square M by Gaussian elimination with partial pivoting
// (largest magnitude in float mode, first nonzero in exact mode).
template <class T>
Matrix<T> solve(Matrix<T> m, Matrix<T> b) {
  const size_t n = m.rows();
  for (size_t c = 0; c < n; ++c) {
    size_t piv = n;
    if constexpr (ScalarTraits<T>::kExact) {
      for (size_t r = c; r < n; ++r)
        if (sgn(m(r, c)) != 0) {
          piv = r;
          break;
        }
    } else {
      double best = 0;
      for (size_t r = c; r < n; ++r)
        if (std::abs(m(r, c)) > best) {
          best = std::abs(m(r, c));
          piv = r;
        }
      if (best <= 1e-14) piv = n;
    }
    if (piv == n) throw std::invalid_argument("points are not affinely independent");
    for (size_t k = 0; k < n; ++k) std::swap(m(c, k), m(piv, k));
    for (size_t k = 0; k < b.cols(); ++k) std::swap(b(c, k), b(piv, k));
    for (size_t r = 0; r < n; ++r) {
      if (r == c || m(r, c) == 0) continue;
      const T f = m(r, c) / m(c, c);
      for (size_t k = c; k < n; ++k) m(r, k) -= f * m(c, k);
      for (size_t k = 0; k < b.cols(); ++k) b(r, k) -= f * b(c, k);
    }
  }
  for (size_t r = 0; r < n; ++r)
    for (size_t k = 0; k < b.cols(); ++k) b(r, k) /= m(r, r);
  return b;
}

// Rows 0..n0-1: linear part transposed; row n0: constant term.
template <class T>
Matrix<T> fit_affine(const Parameter<T>& p, const Batch<T>& pts) {
  const size_t n0 = p.arch().input_dim();
  if (pts.size() < n0 + 1) {
    throw std::invalid_argument("need n_0 + 1 points per cell to fit an affine piece");
  }
  Matrix<T> m(n0 + 1, n0 + 1);
  Matrix<T> b(n0 + 1, p.arch().output_dim());
  for (size_t i = 0; i <= n0; ++i) {
    if (pts[i].size() != n0) throw std::invalid_argument("point dimension mismatch");
    for (size_t c = 0; c < n0; ++c) m(i, c) = pts[i][c];
    m(i, n0) = T(1);
    const auto f = evaluate(p, std::span<const T>(pts[i]));
    for (size_t r = 0; r < f.size(); ++r) b(i, r) = f[r];
  }
  return solve(std::move(m), std::move(b));
}

}  // namespace

template <class T>
AffineEquation<T> detect_hyperplane(const Parameter<T>& p, const Batch<T>& cell_x,
                                    const Batch<T>& cell_y) {
  const size_t n0 = p.arch().input_dim();
  const Matrix<T> fx = fit_affine(p, cell_x);
  const Matrix<T> fy = fit_affine(p, cell_y);
  for (size_t r = 0; r < fx.cols(); ++r) {
    AffineEquation<T> eq;
    eq.coeffs.resize(n0);
    std::optional<size_t> lead;
    for (size_t c = 0; c < n0; ++c) {
      eq.coeffs[c] = fx(c, r) - fy(c, r);
      if (!lead && !near_zero(eq.coeffs[c], 1e-12)) lead = c;
    }
    if (!lead) continue;
    eq.constant = fx(n0, r) - fy(n0, r);
    const T scale = eq.coeffs[*lead];
    for (auto& v : eq.coeffs) v /= scale;
    eq.constant /= scale;
    return eq;
  }
  throw NoDetectableWall("the two cells have equal linear parts in every output");
}

template <class T>
StabilityVerdict<T> probe_combinatorial_stability(const Parameter<T>& p, const T& eps,
                                                  size_t trials, std::uint64_t seed) {
  if (!(eps > 0)) throw std::invalid_argument("stability probe: eps must be positive");
  const Complex1D<T> base = complex_1d(p);
  const std::vector<T> s = p.flatten();
  StabilityVerdict<T> verdict;
  verdict.eps = ScalarTraits<T>::to_double(eps);
  for (size_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    std::vector<T> delta(s.size());
    std::vector<T> moved = s;
    for (size_t j = 0; j < s.size(); ++j) {
      delta[j] = eps * T(static_cast<long>(rng.uniform_int(-1024, 1024))) / T(1024);
      moved[j] += delta[j];
    }
    const Complex1D<T> c = complex_1d(Parameter<T>::from_flat(p.arch(), moved));
    verdict.trials = t + 1;
    std::string reason;
    if (c.cells.size() != base.cells.size()) {
      reason = "cell count " + std::to_string(base.cells.size()) + " -> " +
               std::to_string(c.cells.size());
    } else {
      for (size_t k = 0; k < c.cells.size() && reason.empty(); ++k) {
        if (!(c.cells[k].label == base.cells[k].label)) {
          reason = "cell " + std::to_string(k) + " label " + base.cells[k].label.to_string() +
                   " -> " + c.cells[k].label.to_string();
        }
      }
      for (size_t k = 0; k < c.vertex_labels.size() && reason.empty(); ++k) {
        if (!(c.vertex_labels[k] == base.vertex_labels[k])) {
          reason = "vertex " + std::to_string(k) + " label " +
                   base.vertex_labels[k].to_string() + " -> " + c.vertex_labels[k].to_string();
        }
      }
    }
    if (!reason.empty()) {
      verdict.stable = false;
      verdict.witness = std::move(delta);
      verdict.reason = std::move(reason);
      return verdict;
    }
  }
  return verdict;
}

template <class T>
bool is_transversal_1d(const Parameter<T>& /*p*/, const Complex1D<T>& c) {
  for (const auto& cell : c.cells)
    for (const auto& layer : cell.pre)
      for (const auto& f : layer)
        if (identically_zero(f)) return false;
  for (size_t k = 0; k < c.breakpoints.size(); ++k) {
    const auto& left = c.cells[k];
    const auto& right = c.cells[k + 1];
    const T& b = c.breakpoints[k];
    for (size_t l = 0; l < left.pre.size(); ++l)
      for (size_t i = 0; i < left.pre[l].size(); ++i) {
        if (!near_zero(left.pre[l][i].at(b))) continue;
        if (near_zero(left.pre[l][i].slope) || near_zero(right.pre[l][i].slope)) return false;
      }
  }
  return true;
}

template <class T>
bool is_generic_1d(const Parameter<T>& /*p*/, const Complex1D<T>& c) {
  for (const auto& cell : c.cells)
    for (const auto& layer : cell.pre)
      for (const auto& f : layer)
        if (identically_zero(f)) return false;
  for (size_t k = 0; k < c.breakpoints.size(); ++k) {
    const auto& left = c.cells[k];
    const T& b = c.breakpoints[k];
    for (const auto& layer : left.pre) {
      size_t walls = 0;
      for (const auto& f : layer) walls += near_zero(f.at(b));
      if (walls > 1) return false;
    }
  }
  return true;
}

#define FUNDIM_INSTANTIATE_PWL(T)                                                            \
  template Complex1D<T> complex_1d(const Parameter<T>&, double, double);                     \
  template T cell_representative(const Cell1D<T>&);                                           \
  template DecisiveSet<T> decisive_set(const Parameter<T>&, const Complex1D<T>&,              \
                                       SmoothnessPolicy, double);                             \
  template RegionAtlas<T> discover_regions(const Parameter<T>&, Box, size_t, std::uint64_t,   \
                                           double);                                           \
  template DecisiveSet<T> decisive_set(const Parameter<T>&, const RegionAtlas<T>&);           \
  template SlopesValues<T> sv_map(const Parameter<T>&, const Complex1D<T>&);                  \
  template SlopesValues<T> sv_map(const Parameter<T>&, const RegionAtlas<T>&);                \
  template RankReport<double> sv_rank(const Parameter<T>&, double, double);                   \
  template AffineEquation<T> detect_hyperplane(const Parameter<T>&, const Batch<T>&,          \
                                               const Batch<T>&);                              \
  template StabilityVerdict<T> probe_combinatorial_stability(const Parameter<T>&, const T&,   \
                                                             size_t, std::uint64_t);          \
  template bool is_transversal_1d(const Parameter<T>&, const Complex1D<T>&);                  \
  template bool is_generic_1d(const Parameter<T>&, const Complex1D<T>&);

FUNDIM_INSTANTIATE_PWL(Rational)
FUNDIM_INSTANTIATE_PWL(double)

}  // namespace fundim
