#pragma once

// Feedforward ReLU networks: architectures, parameters, evaluation and
// ternary activation labels.
//
// Layer indices in this API are 0-based: layers()[l] is the affine map
// A^{l+1} of shape n_{l+1} x (n_l + 1), whose last column is the bias.
// Neuron indices are 0-based as well.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fundim/linalg.hpp"
#include "fundim/scalar.hpp"

namespace fundim {

class Architecture {
 public:
  // widths = (n_0, ..., n_m) with m >= 1 and every width >= 1.
  explicit Architecture(std::vector<size_t> widths);

  const std::vector<size_t>& widths() const { return widths_; }
  size_t depth() const { return widths_.size() - 1; }  // m
  size_t input_dim() const { return widths_.front(); }
  size_t output_dim() const { return widths_.back(); }
  size_t width(size_t i) const { return widths_.at(i); }
  size_t hidden_neurons() const;  // n_1 + ... + n_{m-1}
  size_t total_neurons() const;   // n_1 + ... + n_m

  friend bool operator==(const Architecture&, const Architecture&) = default;

 private:
  std::vector<size_t> widths_;
};

// D(n_0, ..., n_m) = sum_i n_i (n_{i-1} + 1).
size_t param_dim(const Architecture& arch);

std::string to_string(const Architecture& arch);

// Per-layer sign tuples of the pre-activations, sgn(0) = 0.
struct TernaryLabel {
  std::vector<std::vector<std::int8_t>> layers;

  bool has_zero() const;
  size_t size() const;
  std::string to_string() const;

  friend bool operator==(const TernaryLabel&, const TernaryLabel&) = default;
  friend auto operator<=>(const TernaryLabel&, const TernaryLabel&) = default;
};

template <class T>
class Parameter {
 public:
  using Scalar = T;

  Parameter(Architecture arch, std::vector<Matrix<T>> layers);

  static Parameter zeros(const Architecture& arch);
  // Flat coordinates in layer order, each layer row-major (bias last).
  static Parameter from_flat(const Architecture& arch, std::span<const T> flat);

  const Architecture& arch() const { return arch_; }
  const std::vector<Matrix<T>>& layers() const { return layers_; }
  const Matrix<T>& layer(size_t l) const { return layers_.at(l); }
  size_t depth() const { return layers_.size(); }

  std::vector<T> flatten() const;
  // Offset of layer l's first coordinate in the flat vector.
  size_t offset(size_t l) const;

  friend bool operator==(const Parameter&, const Parameter&) = default;

 private:
  Architecture arch_;
  std::vector<Matrix<T>> layers_;
};

using RationalParameter = Parameter<Rational>;
using FloatParameter = Parameter<double>;

template <class T>
struct ForwardTrace {
  std::vector<T> input;
  std::vector<std::vector<T>> pre;   // y^l, l = 1..m
  std::vector<std::vector<T>> post;  // x^l = max(0, y^l)
  TernaryLabel label;

  const std::vector<T>& output() const { return post.back(); }
};

template <class T>
ForwardTrace<T> forward(const Parameter<T>& p, std::span<const T> x,
                        double zero_tol = kDefaultZeroTol);

// Output only; avoids building the trace.
template <class T>
std::vector<T> evaluate(const Parameter<T>& p, std::span<const T> x);

template <class T>
TernaryLabel ternary_label(const Parameter<T>& p, std::span<const T> x,
                           double zero_tol = kDefaultZeroTol);

template <class T>
struct MaskedLayers {
  std::vector<Matrix<T>> masked;     // row i zeroed iff theta_i <= 0
  std::vector<Matrix<T>> augmented;  // masked with unit row e_{n+1}^T appended
};

template <class T>
MaskedLayers<T> masked_affine(const Parameter<T>& p, const TernaryLabel& label);

// Post-activation x^{layer+1}_{neuron} at x.
template <class T>
T node_map(const Parameter<T>& p, size_t layer, size_t neuron, std::span<const T> x);

enum class Smoothness { kSmoothNoZeros, kSmoothStableDead, kUnknown };

std::string_view to_string(Smoothness s);

// kSmoothNoZeros iff the label has no zeros. kSmoothStableDead if every zero
// neuron is either stably unactivated (sign condition or interval bound) or
// sits upstream of a layer whose neurons are all strictly negative at x.
template <class T>
Smoothness smoothness(const Parameter<T>& p, std::span<const T> x,
                      double zero_tol = kDefaultZeroTol);

// Row `neuron` of layer `layer` (layer >= 1, i.e. network layer >= 2) has
// strictly negative weights and strictly negative bias. Such a neuron outputs
// zero on the positive orthant for every nearby parameter.
template <class T>
bool stably_unactivated_sufficient(const Parameter<T>& p, size_t layer, size_t neuron);

// Interval propagation over all of R^{n_0}: true if the neuron's
// pre-activation is bounded above by a strictly negative number, robustly
// under small parameter perturbations.
template <class T>
bool stably_unactivated_interval(const Parameter<T>& p, size_t layer, size_t neuron);

template <class T>
Parameter<double> to_float(const Parameter<T>& p);
RationalParameter to_rational(const FloatParameter& p);

}  // namespace fundim
