#include "fundim/funcdim.hpp"

#include <cmath>
#include <sstream>

#include "fundim/errors.hpp"
#include "fundim/pwl_complex.hpp"
#include "fundim/random.hpp"

namespace fundim {

std::string_view to_string(RankBackend b) {
  return b == RankBackend::kExact ? "exact" : "numeric";
}

std::string_view to_string(BoundKind k) {
  return k == BoundKind::kExact ? "exact" : "certified_lower_bound";
}

std::string_view to_string(DimStrategy s) {
  return s == DimStrategy::kDecisive1D ? "decisive_1d" : "random_saturation";
}

DimStrategy parse_dim_strategy(std::string_view text) {
  if (text == "decisive" || text == "decisive_1d") return DimStrategy::kDecisive1D;
  if (text == "random" || text == "random_saturation" || text == "saturation") {
    return DimStrategy::kRandomSaturation;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(text) +
                              "' (expected decisive|random)");
}

namespace {

template <class T>
std::string point_string(const std::vector<T>& x) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < x.size(); ++i) {
    if (i) os << ',';
    if constexpr (ScalarTraits<T>::kExact) {
      os << to_string(x[i]);
    } else {
      os << x[i];
    }
  }
  os << ')';
  return os.str();
}

template <class T>
bool admissible(const Parameter<T>& p, std::span<const T> x, SmoothnessPolicy policy,
                double zero_tol) {
  const Smoothness s = smoothness(p, x, zero_tol);
  if (s == Smoothness::kSmoothNoZeros) return true;
  return policy == SmoothnessPolicy::kPermissive && s == Smoothness::kSmoothStableDead;
}

template <class T>
RankReport<T> make_report(const std::string& strategy, double tol) {
  RankReport<T> r;
  r.strategy = strategy;
  if constexpr (!ScalarTraits<T>::kExact) r.tol = tol;
  return r;
}

// Accumulates Jacobian rows and tracks their rank with the backend of T.
template <class T>
class RankAccumulator;

template <>
class RankAccumulator<Rational> {
 public:
  RankAccumulator(size_t cols, double /*tol*/) : basis_(cols) {}
  bool add(const RationalMatrix& rows) {
    bool grew = false;
    for (size_t r = 0; r < rows.rows(); ++r) grew = basis_.add(rows.row(r)) || grew;
    return grew;
  }
  size_t rank() const { return basis_.rank(); }

 private:
  RationalRowBasis basis_;
};

template <>
class RankAccumulator<double> {
 public:
  RankAccumulator(size_t cols, double tol) : kept_(0, cols), tol_(tol) {}
  bool add(const FloatMatrix& rows) {
    FloatMatrix candidate = kept_;
    candidate.append_rows(rows);
    const size_t r = rank_numeric(candidate, tol_);
    if (r <= rank_) return false;
    rank_ = r;
    kept_ = std::move(candidate);
    return true;
  }
  size_t rank() const { return rank_; }

 private:
  FloatMatrix kept_;
  double tol_;
  size_t rank_ = 0;
};

}  // namespace

template <class T>
void require_smooth(const Parameter<T>& p, const Batch<T>& z, SmoothnessPolicy policy,
                    double zero_tol) {
  std::vector<std::string> bad;
  for (const auto& x : z) {
    if (!admissible(p, std::span<const T>(x), policy, zero_tol)) bad.push_back(point_string(x));
  }
  if (bad.empty()) return;
  std::string msg = "non-smooth point(s) in batch:";
  for (const auto& b : bad) msg += " " + b;
  throw NonSmoothPointError(msg);
}

template <class T>
Matrix<T> point_jacobian(const Parameter<T>& p, std::span<const T> x, double zero_tol) {
  const ForwardTrace<T> trace = forward(p, x, zero_tol);
  const size_t m = p.depth();
  const size_t out = p.arch().output_dim();
  Matrix<T> jac(out, param_dim(p.arch()));

  // g = G^l, the derivative of the output with respect to the post-activation
  // of layer l pushed through its mask: out x n_l.
  Matrix<T> g(out, out);
  for (size_t r = 0; r < out; ++r) {
    if (trace.label.layers[m - 1][r] > 0) g(r, r) = T(1);
  }
  for (size_t l = m; l-- > 0;) {
    const Matrix<T>& a = p.layer(l);
    const size_t n_in = a.cols() - 1;
    const std::vector<T>& x_in = l == 0 ? trace.input : trace.post[l - 1];
    const size_t off = p.offset(l);
    for (size_t r = 0; r < out; ++r) {
      for (size_t i = 0; i < a.rows(); ++i) {
        const T& gi = g(r, i);
        if (gi == 0) continue;
        const size_t base = off + i * a.cols();
        for (size_t b = 0; b < n_in; ++b) jac(r, base + b) = gi * x_in[b];
        jac(r, base + n_in) = gi;
      }
    }
    if (l == 0) break;
    // G^{l-1} = G^l W^l D_{l-1}
    const auto& prev_label = trace.label.layers[l - 1];
    Matrix<T> next(out, n_in);
    for (size_t r = 0; r < out; ++r)
      for (size_t i = 0; i < a.rows(); ++i) {
        const T& gi = g(r, i);
        if (gi == 0) continue;
        for (size_t b = 0; b < n_in; ++b) {
          if (prev_label[b] > 0) next(r, b) += gi * a(i, b);
        }
      }
    g = std::move(next);
  }
  return jac;
}

template <class T>
Matrix<T> eval_jacobian(const Parameter<T>& p, const Batch<T>& z, SmoothnessPolicy policy,
                        double zero_tol) {
  require_smooth(p, z, policy, zero_tol);
  Matrix<T> jac(0, param_dim(p.arch()));
  for (const auto& x : z) jac.append_rows(point_jacobian(p, std::span<const T>(x), zero_tol));
  return jac;
}

size_t FdJacobian::flagged_count() const {
  size_t n = 0;
  for (bool f : flagged) n += f;
  return n;
}

FdJacobian eval_jacobian_fd(const FloatParameter& p, const Batch<double>& z, double h,
                            double flag_tol) {
  if (!(h > 0)) throw std::invalid_argument("eval_jacobian_fd: step must be positive");
  const size_t out = p.arch().output_dim();
  const size_t d = param_dim(p.arch());
  const std::vector<double> s = p.flatten();
  FdJacobian fd{FloatMatrix(z.size() * out, d), std::vector<bool>(z.size() * out * d, false)};
  std::vector<double> shifted = s;
  for (size_t j = 0; j < d; ++j) {
    shifted[j] = s[j] + h;
    const auto plus = FloatParameter::from_flat(p.arch(), shifted);
    shifted[j] = s[j] - h;
    const auto minus = FloatParameter::from_flat(p.arch(), shifted);
    shifted[j] = s[j];
    for (size_t i = 0; i < z.size(); ++i) {
      const std::span<const double> x(z[i]);
      const auto f0 = evaluate(p, x);
      const auto fp = evaluate(plus, x);
      const auto fm = evaluate(minus, x);
      for (size_t r = 0; r < out; ++r) {
        const double fwd = (fp[r] - f0[r]) / h;
        const double bwd = (f0[r] - fm[r]) / h;
        const size_t row = i * out + r;
        fd.value(row, j) = (fp[r] - fm[r]) / (2 * h);
        const double scale = 1.0 + std::abs(fwd) + std::abs(bwd);
        fd.flagged[row * d + j] = std::abs(fwd - bwd) > flag_tol * scale;
      }
    }
  }
  return fd;
}

template <class T>
RankReport<T> batch_dim(const Parameter<T>& p, const Batch<T>& z, SmoothnessPolicy policy,
                        double tol) {
  RankReport<T> report = make_report<T>("batch", tol);
  report.value = rank_of(eval_jacobian(p, z, policy), tol);
  report.witness = z;
  return report;
}

template <class T>
RankReport<T> stochastic_dim(const Parameter<T>& p, const std::vector<T>& z,
                             SmoothnessPolicy policy, double tol) {
  RankReport<T> report = batch_dim(p, Batch<T>{z}, policy, tol);
  report.strategy = "stochastic";
  return report;
}

namespace {

template <class T>
RankReport<T> decisive_dim(const Parameter<T>& p, const FunctionalDimOptions& opts) {
  if (p.arch().input_dim() != 1) {
    throw std::invalid_argument("decisive_1d strategy requires input dimension 1");
  }
  const Complex1D<T> complex = complex_1d(p, opts.zero_tol);
  Complex1D<T> sampled = complex;
  if (opts.positive_orthant_only) {
    // Clip every cell to (0, inf) and drop the ones left empty.
    std::erase_if(sampled.cells, [](const Cell1D<T>& c) { return c.hi && *c.hi <= 0; });
    for (auto& c : sampled.cells) {
      if (!c.lo || *c.lo < 0) c.lo = T(0);
    }
  }
  const DecisiveSet<T> ds = decisive_set(p, sampled, opts.policy, opts.zero_tol);
  if (ds.points.empty()) {
    throw NonOrdinarySuspected("no top cell with a smooth label; parameter may be non-ordinary");
  }
  RankReport<T> report = batch_dim(p, ds.points, opts.policy, opts.tol);
  report.strategy = std::string(to_string(DimStrategy::kDecisive1D));
  const bool transversal = is_transversal_1d(p, complex);
  const bool generic = is_generic_1d(p, complex);
  if (!ds.skipped.empty()) {
    report.notes.push_back(std::to_string(ds.skipped.size()) +
                           " cell(s) with a zero label skipped");
  }
  if (!transversal) report.notes.push_back("complex is not transversal");
  if (!generic) report.notes.push_back("complex is not generic");
  if (opts.positive_orthant_only) report.notes.push_back("restricted to the positive orthant");
  report.bound = ds.skipped.empty() && transversal && generic ? BoundKind::kExact
                                                              : BoundKind::kLowerBound;
  return report;
}

template <class T>
RankReport<T> saturation_dim(const Parameter<T>& p, const FunctionalDimOptions& opts) {
  const size_t d = param_dim(p.arch());
  const size_t max_points = opts.max_points ? opts.max_points : 4 * d;
  const size_t patience = opts.patience ? opts.patience : d;
  const size_t n0 = p.arch().input_dim();

  RankReport<T> report = make_report<T>(std::string(to_string(DimStrategy::kRandomSaturation)),
                                        opts.tol);
  report.bound = BoundKind::kLowerBound;
  RankAccumulator<T> acc(d, opts.tol);
  Rng rng(opts.seed);
  size_t accepted = 0;
  size_t attempts = 0;
  size_t since_increase = 0;
  bool saturated = false;
  const size_t budget = max_points * opts.attempts_per_point;
  while (accepted < max_points && attempts < budget) {
    std::vector<T> x = random_point<T>(rng, n0, opts.box, opts.positive_orthant_only);
    ++attempts;
    if (!admissible(p, std::span<const T>(x), opts.policy, opts.zero_tol)) continue;
    ++accepted;
    if (acc.add(point_jacobian(p, std::span<const T>(x), opts.zero_tol))) {
      report.witness.push_back(std::move(x));
      since_increase = 0;
    } else {
      ++since_increase;
    }
    if (acc.rank() == d || since_increase >= patience) {
      saturated = true;
      break;
    }
  }
  if (accepted == 0) {
    throw NonOrdinarySuspected("no smooth point found in " + std::to_string(attempts) +
                               " draws; parameter may be non-ordinary");
  }
  if (!saturated && attempts >= budget) {
    report.notes.push_back("smooth-point draw budget exhausted after " +
                           std::to_string(accepted) + " points");
  }
  // Small cells are easy to miss by sampling; the complex-based strategy is not.
  if (n0 == 1 && acc.rank() < d) {
    report.notes.push_back("one-input network: the decisive strategy visits every cell");
  }
  report.value = acc.rank();
  report.saturated = saturated;
  return report;
}

}  // namespace

template <class T>
RankReport<T> functional_dim(const Parameter<T>& p, const FunctionalDimOptions& opts) {
  if (opts.strategy == DimStrategy::kDecisive1D) return decisive_dim(p, opts);
  return saturation_dim(p, opts);
}

size_t upper_bound(const Architecture& arch) {
  size_t b = arch.output_dim();
  for (size_t i = 0; i + 1 < arch.widths().size(); ++i) b += arch.width(i) * arch.width(i + 1);
  return b;
}

size_t bound_gap_lower(const Architecture& arch) { return arch.hidden_neurons(); }

template <class T>
size_t off_neuron_bound(const Parameter<T>& p, std::span<const T> z, double zero_tol) {
  const TernaryLabel label = ternary_label(p, z, zero_tol);
  size_t prev = p.arch().input_dim();
  size_t d = 0;
  for (const auto& layer : label.layers) {
    size_t on = 0;
    for (auto v : layer) on += v > 0;
    d += on * (prev + 1);
    prev = on;
  }
  return d;
}

#define FUNDIM_INSTANTIATE_FUNCDIM(T)                                                      \
  template void require_smooth(const Parameter<T>&, const Batch<T>&, SmoothnessPolicy,      \
                               double);                                                     \
  template Matrix<T> point_jacobian(const Parameter<T>&, std::span<const T>, double);       \
  template Matrix<T> eval_jacobian(const Parameter<T>&, const Batch<T>&, SmoothnessPolicy,  \
                                   double);                                                 \
  template RankReport<T> stochastic_dim(const Parameter<T>&, const std::vector<T>&,         \
                                        SmoothnessPolicy, double);                          \
  template RankReport<T> batch_dim(const Parameter<T>&, const Batch<T>&, SmoothnessPolicy,  \
                                   double);                                                 \
  template RankReport<T> functional_dim(const Parameter<T>&, const FunctionalDimOptions&);  \
  template size_t off_neuron_bound(const Parameter<T>&, std::span<const T>, double);

FUNDIM_INSTANTIATE_FUNCDIM(Rational)
FUNDIM_INSTANTIATE_FUNCDIM(double)

}  // namespace fundim
