#include "fundim/network.hpp"

#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace fundim {

Architecture::Architecture(std::vector<size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) {
    throw std::invalid_argument("architecture needs at least two widths (m >= 1)");
  }
  for (size_t w : widths_) {
    if (w == 0) throw std::invalid_argument("architecture widths must be >= 1");
  }
}

size_t Architecture::hidden_neurons() const {
  return std::accumulate(widths_.begin() + 1, widths_.end() - 1, size_t{0});
}

size_t Architecture::total_neurons() const {
  return std::accumulate(widths_.begin() + 1, widths_.end(), size_t{0});
}

size_t param_dim(const Architecture& arch) {
  size_t d = 0;
  for (size_t i = 1; i < arch.widths().size(); ++i) {
    d += arch.width(i) * (arch.width(i - 1) + 1);
  }
  return d;
}

std::string to_string(const Architecture& arch) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < arch.widths().size(); ++i) {
    if (i) os << ',';
    os << arch.width(i);
  }
  os << ')';
  return os.str();
}

bool TernaryLabel::has_zero() const {
  for (const auto& layer : layers)
    for (auto v : layer)
      if (v == 0) return true;
  return false;
}

size_t TernaryLabel::size() const {
  size_t n = 0;
  for (const auto& layer : layers) n += layer.size();
  return n;
}

std::string TernaryLabel::to_string() const {
  std::ostringstream os;
  os << '(';
  for (size_t l = 0; l < layers.size(); ++l) {
    if (l) os << ',';
    os << '(';
    for (size_t i = 0; i < layers[l].size(); ++i) {
      if (i) os << ',';
      os << static_cast<int>(layers[l][i]);
    }
    os << ')';
  }
  os << ')';
  return os.str();
}

std::string_view to_string(Smoothness s) {
  switch (s) {
    case Smoothness::kSmoothNoZeros:
      return "SmoothNoZeros";
    case Smoothness::kSmoothStableDead:
      return "SmoothStableDead";
    case Smoothness::kUnknown:
      return "Unknown";
  }
  return "Unknown";
}

template <class T>
Parameter<T>::Parameter(Architecture arch, std::vector<Matrix<T>> layers)
    : arch_(std::move(arch)), layers_(std::move(layers)) {
  if (layers_.size() != arch_.depth()) {
    throw std::invalid_argument("parameter has " + std::to_string(layers_.size()) +
                                " layers, architecture " + fundim::to_string(arch_) +
                                " needs " + std::to_string(arch_.depth()));
  }
  for (size_t l = 0; l < layers_.size(); ++l) {
    const size_t rows = arch_.width(l + 1);
    const size_t cols = arch_.width(l) + 1;
    if (layers_[l].rows() != rows || layers_[l].cols() != cols) {
      throw std::invalid_argument(
          "layer " + std::to_string(l + 1) + " has shape " +
          std::to_string(layers_[l].rows()) + "x" + std::to_string(layers_[l].cols()) +
          ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
}

template <class T>
Parameter<T> Parameter<T>::zeros(const Architecture& arch) {
  std::vector<Matrix<T>> layers;
  for (size_t l = 0; l < arch.depth(); ++l) {
    layers.emplace_back(arch.width(l + 1), arch.width(l) + 1);
  }
  return Parameter(arch, std::move(layers));
}

template <class T>
Parameter<T> Parameter<T>::from_flat(const Architecture& arch, std::span<const T> flat) {
  if (flat.size() != param_dim(arch)) {
    throw std::invalid_argument("flat parameter has " + std::to_string(flat.size()) +
                                " coordinates, architecture " + fundim::to_string(arch) +
                                " needs " + std::to_string(param_dim(arch)));
  }
  std::vector<Matrix<T>> layers;
  size_t pos = 0;
  for (size_t l = 0; l < arch.depth(); ++l) {
    const size_t rows = arch.width(l + 1);
    const size_t cols = arch.width(l) + 1;
    std::vector<T> entries(flat.begin() + pos, flat.begin() + pos + rows * cols);
    pos += rows * cols;
    layers.emplace_back(rows, cols, std::move(entries));
  }
  return Parameter(arch, std::move(layers));
}

template <class T>
std::vector<T> Parameter<T>::flatten() const {
  std::vector<T> flat;
  flat.reserve(param_dim(arch_));
  for (const auto& layer : layers_) {
    flat.insert(flat.end(), layer.entries().begin(), layer.entries().end());
  }
  return flat;
}

template <class T>
size_t Parameter<T>::offset(size_t l) const {
  size_t off = 0;
  for (size_t i = 0; i < l; ++i) off += layers_[i].entries().size();
  return off;
}

namespace {

template <class T>
void check_input(const Parameter<T>& p, std::span<const T> x) {
  if (x.size() != p.arch().input_dim()) {
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) +
                                ", network expects " +
                                std::to_string(p.arch().input_dim()));
  }
}

template <class T>
std::vector<T> affine(const Matrix<T>& a, std::span<const T> x) {
  const size_t n = x.size();
  std::vector<T> y(a.rows());
  for (size_t r = 0; r < a.rows(); ++r) {
    T acc = a(r, n);
    for (size_t c = 0; c < n; ++c) acc += a(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

}  // namespace

template <class T>
ForwardTrace<T> forward(const Parameter<T>& p, std::span<const T> x, double zero_tol) {
  check_input(p, x);
  ForwardTrace<T> trace;
  trace.input.assign(x.begin(), x.end());
  std::vector<T> current = trace.input;
  for (const auto& a : p.layers()) {
    std::vector<T> y = affine(a, std::span<const T>(current));
    std::vector<T> post(y.size());
    std::vector<std::int8_t> signs(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
      signs[i] = static_cast<std::int8_t>(ScalarTraits<T>::sign(y[i], zero_tol));
      post[i] = relu(y[i]);
    }
    trace.pre.push_back(std::move(y));
    trace.post.push_back(post);
    trace.label.layers.push_back(std::move(signs));
    current = std::move(post);
  }
  return trace;
}

template <class T>
std::vector<T> evaluate(const Parameter<T>& p, std::span<const T> x) {
  check_input(p, x);
  std::vector<T> current(x.begin(), x.end());
  for (const auto& a : p.layers()) {
    std::vector<T> y = affine(a, std::span<const T>(current));
    for (auto& v : y) v = relu(v);
    current = std::move(y);
  }
  return current;
}

template <class T>
TernaryLabel ternary_label(const Parameter<T>& p, std::span<const T> x, double zero_tol) {
  return forward(p, x, zero_tol).label;
}

template <class T>
MaskedLayers<T> masked_affine(const Parameter<T>& p, const TernaryLabel& label) {
  if (label.layers.size() != p.depth()) {
    throw std::invalid_argument("label depth does not match parameter");
  }
  MaskedLayers<T> out;
  for (size_t l = 0; l < p.depth(); ++l) {
    const Matrix<T>& a = p.layer(l);
    if (label.layers[l].size() != a.rows()) {
      throw std::invalid_argument("label width does not match layer " + std::to_string(l + 1));
    }
    Matrix<T> masked = a;
    for (size_t r = 0; r < a.rows(); ++r) {
      if (label.layers[l][r] <= 0) {
        for (auto& v : masked.row(r)) v = T(0);
      }
    }
    Matrix<T> augmented(a.rows() + 1, a.cols());
    for (size_t r = 0; r < a.rows(); ++r)
      for (size_t c = 0; c < a.cols(); ++c) augmented(r, c) = masked(r, c);
    augmented(a.rows(), a.cols() - 1) = T(1);
    out.masked.push_back(std::move(masked));
    out.augmented.push_back(std::move(augmented));
  }
  return out;
}

template <class T>
T node_map(const Parameter<T>& p, size_t layer, size_t neuron, std::span<const T> x) {
  if (layer >= p.depth() || neuron >= p.arch().width(layer + 1)) {
    throw std::out_of_range("node_map: neuron (" + std::to_string(layer) + "," +
                            std::to_string(neuron) + ") out of range");
  }
  check_input(p, x);
  std::vector<T> current(x.begin(), x.end());
  for (size_t l = 0; l <= layer; ++l) {
    std::vector<T> y = affine(p.layer(l), std::span<const T>(current));
    for (auto& v : y) v = relu(v);
    current = std::move(y);
  }
  return current[neuron];
}

template <class T>
bool stably_unactivated_sufficient(const Parameter<T>& p, size_t layer, size_t neuron) {
  if (layer == 0 || layer >= p.depth()) {
    throw std::invalid_argument(
        "stably_unactivated_sufficient: defined for network layers >= 2 only");
  }
  const Matrix<T>& a = p.layer(layer);
  if (neuron >= a.rows()) throw std::out_of_range("stably_unactivated_sufficient: neuron");
  for (const T& v : a.row(neuron)) {
    if (!(v < 0)) return false;
  }
  return true;
}

namespace {

// Closed interval with optional (infinite) ends.
template <class T>
struct Interval {
  std::optional<T> lo;
  std::optional<T> hi;
};

template <class T>
std::vector<std::vector<Interval<T>>> pre_activation_bounds(const Parameter<T>& p) {
  std::vector<Interval<T>> current(p.arch().input_dim());  // all of R^{n_0}
  std::vector<std::vector<Interval<T>>> out;
  for (const auto& a : p.layers()) {
    const size_t n = a.cols() - 1;
    std::vector<Interval<T>> pre(a.rows());
    for (size_t r = 0; r < a.rows(); ++r) {
      std::optional<T> lo = a(r, n);
      std::optional<T> hi = a(r, n);
      for (size_t c = 0; c < n; ++c) {
        const T& w = a(r, c);
        const auto& in = current[c];
        if (w == 0) {
          // A perturbed zero weight on an unbounded input is unbounded.
          if (!in.lo || !in.hi) {
            lo.reset();
            hi.reset();
          }
          continue;
        }
        const auto& for_lo = w > 0 ? in.lo : in.hi;
        const auto& for_hi = w > 0 ? in.hi : in.lo;
        if (lo) {
          if (for_lo) *lo += w * *for_lo;
          else lo.reset();
        }
        if (hi) {
          if (for_hi) *hi += w * *for_hi;
          else hi.reset();
        }
      }
      pre[r] = {lo, hi};
    }
    std::vector<Interval<T>> post(a.rows());
    for (size_t r = 0; r < a.rows(); ++r) {
      post[r].lo = pre[r].lo ? relu(*pre[r].lo) : T(0);
      if (pre[r].hi) post[r].hi = relu(*pre[r].hi);
    }
    out.push_back(std::move(pre));
    current = std::move(post);
  }
  return out;
}

}  // namespace

template <class T>
bool stably_unactivated_interval(const Parameter<T>& p, size_t layer, size_t neuron) {
  if (layer >= p.depth() || neuron >= p.arch().width(layer + 1)) {
    throw std::out_of_range("stably_unactivated_interval: neuron out of range");
  }
  const auto bounds = pre_activation_bounds(p);
  const auto& hi = bounds[layer][neuron].hi;
  return hi && *hi < 0;
}

template <class T>
Smoothness smoothness(const Parameter<T>& p, std::span<const T> x, double zero_tol) {
  const TernaryLabel label = ternary_label(p, x, zero_tol);
  if (!label.has_zero()) return Smoothness::kSmoothNoZeros;

  // Index of the last layer at which every neuron is strictly negative.
  std::optional<size_t> last_dead_layer;
  for (size_t l = 0; l < label.layers.size(); ++l) {
    bool all_negative = true;
    for (auto v : label.layers[l]) all_negative = all_negative && v < 0;
    if (all_negative) last_dead_layer = l;
  }

  const auto bounds = pre_activation_bounds(p);
  for (size_t l = 0; l < label.layers.size(); ++l) {
    for (size_t i = 0; i < label.layers[l].size(); ++i) {
      if (label.layers[l][i] != 0) continue;
      if (last_dead_layer && *last_dead_layer > l) continue;
      if (l >= 1 && stably_unactivated_sufficient(p, l, i)) continue;
      if (bounds[l][i].hi && *bounds[l][i].hi < 0) continue;
      return Smoothness::kUnknown;
    }
  }
  return Smoothness::kSmoothStableDead;
}

template <class T>
Parameter<double> to_float(const Parameter<T>& p) {
  if constexpr (std::is_same_v<T, double>) {
    return p;
  } else {
    std::vector<double> flat;
    for (const auto& v : p.flatten()) flat.push_back(ScalarTraits<T>::to_double(v));
    return Parameter<double>::from_flat(p.arch(), flat);
  }
}

RationalParameter to_rational(const FloatParameter& p) {
  std::vector<Rational> flat;
  for (double v : p.flatten()) flat.push_back(rational_from_double(v));
  return RationalParameter::from_flat(p.arch(), flat);
}

#define FUNDIM_INSTANTIATE_NETWORK(T)                                                    \
  template class Parameter<T>;                                                            \
  template ForwardTrace<T> forward(const Parameter<T>&, std::span<const T>, double);      \
  template std::vector<T> evaluate(const Parameter<T>&, std::span<const T>);              \
  template TernaryLabel ternary_label(const Parameter<T>&, std::span<const T>, double);   \
  template MaskedLayers<T> masked_affine(const Parameter<T>&, const TernaryLabel&);       \
  template T node_map(const Parameter<T>&, size_t, size_t, std::span<const T>);           \
  template Smoothness smoothness(const Parameter<T>&, std::span<const T>, double);        \
  template bool stably_unactivated_sufficient(const Parameter<T>&, size_t, size_t);       \
  template bool stably_unactivated_interval(const Parameter<T>&, size_t, size_t);         \
  template Parameter<double> to_float(const Parameter<T>&);

FUNDIM_INSTANTIATE_NETWORK(Rational)
FUNDIM_INSTANTIATE_NETWORK(double)

}  // namespace fundim
