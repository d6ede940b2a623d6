#pragma once

// Neural tangent kernel of a finite network and its relation to J E_Z.

#include <functional>
#include <span>
#include <vector>

#include "fundim/funcdim.hpp"

namespace fundim {

// NTK(x, y) = J E_x(s) J E_y(s)^T, an n_m x n_m matrix.
template <class T>
Matrix<T> ntk(const Parameter<T>& p, const std::vector<T>& x, const std::vector<T>& y,
              SmoothnessPolicy policy = SmoothnessPolicy::kStrict);

// K_Z: block (i, j) is NTK(z_i, z_j).
template <class T>
Matrix<T> batch_ntk(const Parameter<T>& p, const Batch<T>& z,
                    SmoothnessPolicy policy = SmoothnessPolicy::kStrict);

struct RankEquality {
  size_t jac_rank = 0;
  size_t ntk_rank = 0;
  bool equal() const { return jac_rank == ntk_rank; }
};

template <class T>
RankEquality verify_rank_equality(const Parameter<T>& p, const Batch<T>& z,
                                  double tol = kDefaultRankTol);

// Smallest eigenvalue of a symmetric matrix (float cross-check of PSD).
double min_eigenvalue(const FloatMatrix& m);

template <class T>
struct Sample {
  std::vector<T> x;
  std::vector<T> y;
};

// Gradient of the cost with respect to the network output, given the
// residual output - target.
template <class T>
using CostGradient = std::function<std::vector<T>(std::span<const T> residual)>;

// C = sum_i |rho(s)(x_i) - y_i|^2, so dC/d(output) = 2 * residual.
template <class T>
CostGradient<T> squared_error() {
  return [](std::span<const T> r) {
    std::vector<T> g(r.begin(), r.end());
    for (auto& v : g) v *= 2;
    return g;
  };
}

template <class T>
struct GradientReport {
  std::vector<T> backprop;  // dC/ds by reverse-mode accumulation
  std::vector<T> product;   // A . J E_Z with A the stacked output gradients
  bool match = false;       // exact equality, or within tol in float mode
  bool in_row_space = false;
};

template <class T>
GradientReport<T> loss_gradient_in_row_space(const Parameter<T>& p,
                                             const std::vector<Sample<T>>& data,
                                             const CostGradient<T>& cost = squared_error<T>(),
                                             double tol = kDefaultRankTol);

}  // namespace fundim
