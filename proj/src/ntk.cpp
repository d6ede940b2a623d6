#include "fundim/ntk.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fundim {

template <class T>
Matrix<T> ntk(const Parameter<T>& p, const std::vector<T>& x, const std::vector<T>& y,
              SmoothnessPolicy policy) {
  const Matrix<T> jx = eval_jacobian(p, Batch<T>{x}, policy);
  const Matrix<T> jy = eval_jacobian(p, Batch<T>{y}, policy);
  return jx * jy.transpose();
}

template <class T>
Matrix<T> batch_ntk(const Parameter<T>& p, const Batch<T>& z, SmoothnessPolicy policy) {
  const Matrix<T> j = eval_jacobian(p, z, policy);
  return j * j.transpose();
}

template <class T>
RankEquality verify_rank_equality(const Parameter<T>& p, const Batch<T>& z, double tol) {
  const Matrix<T> j = eval_jacobian(p, z);
  return {rank_of(j, tol), rank_of(j * j.transpose(), tol)};
}

double min_eigenvalue(const FloatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("min_eigenvalue: matrix not square");
  if (m.empty()) return 0.0;
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

namespace {

// dC/ds accumulated layer by layer from the output backwards.
template <class T>
std::vector<T> backprop_gradient(const Parameter<T>& p, const std::vector<Sample<T>>& data,
                                 const CostGradient<T>& cost) {
  std::vector<T> grad(param_dim(p.arch()), T(0));
  for (const auto& sample : data) {
    const ForwardTrace<T> tr = forward(p, std::span<const T>(sample.x));
    const auto& out = tr.output();
    if (sample.y.size() != out.size()) {
      throw std::invalid_argument("target dimension does not match network output");
    }
    std::vector<T> residual(out.size());
    for (size_t r = 0; r < out.size(); ++r) residual[r] = out[r] - sample.y[r];
    std::vector<T> delta = cost(std::span<const T>(residual));  // dC/dx^m
    for (size_t l = p.depth(); l-- > 0;) {
      // dC/dy^l
      for (size_t i = 0; i < delta.size(); ++i) {
        if (tr.label.layers[l][i] <= 0) delta[i] = T(0);
      }
      const Matrix<T>& a = p.layer(l);
      const size_t n_in = a.cols() - 1;
      const std::vector<T>& x_in = l == 0 ? tr.input : tr.post[l - 1];
      const size_t off = p.offset(l);
      for (size_t i = 0; i < a.rows(); ++i) {
        if (delta[i] == 0) continue;
        for (size_t b = 0; b < n_in; ++b) grad[off + i * a.cols() + b] += delta[i] * x_in[b];
        grad[off + i * a.cols() + n_in] += delta[i];
      }
      std::vector<T> below(n_in, T(0));
      for (size_t i = 0; i < a.rows(); ++i) {
        if (delta[i] == 0) continue;
        for (size_t b = 0; b < n_in; ++b) below[b] += a(i, b) * delta[i];
      }
      delta = std::move(below);
    }
  }
  return grad;
}

}  // namespace

template <class T>
GradientReport<T> loss_gradient_in_row_space(const Parameter<T>& p,
                                             const std::vector<Sample<T>>& data,
                                             const CostGradient<T>& cost, double tol) {
  Batch<T> z;
  for (const auto& s : data) z.push_back(s.x);
  const Matrix<T> j = eval_jacobian(p, z);
  const size_t out = p.arch().output_dim();

  Matrix<T> a(1, z.size() * out);
  for (size_t i = 0; i < data.size(); ++i) {
    const auto f = evaluate(p, std::span<const T>(data[i].x));
    std::vector<T> residual(out);
    for (size_t r = 0; r < out; ++r) residual[r] = f[r] - data[i].y.at(r);
    const auto g = cost(std::span<const T>(residual));
    for (size_t r = 0; r < out; ++r) a(0, i * out + r) = g[r];
  }

  GradientReport<T> report;
  report.backprop = backprop_gradient(p, data, cost);
  const Matrix<T> prod = a * j;
  report.product.assign(prod.entries().begin(), prod.entries().end());
  if constexpr (ScalarTraits<T>::kExact) {
    report.match = report.backprop == report.product;
    report.in_row_space = row_space_contains(j, std::span<const T>(report.backprop));
  } else {
    double worst = 0;
    for (size_t k = 0; k < report.product.size(); ++k) {
      const double scale = 1.0 + std::abs(report.product[k]);
      worst = std::max(worst, std::abs(report.product[k] - report.backprop[k]) / scale);
    }
    report.match = worst <= tol;
    report.in_row_space = row_space_contains(j, std::span<const T>(report.backprop), tol);
  }
  return report;
}

#define FUNDIM_INSTANTIATE_NTK(T)                                                             \
  template Matrix<T> ntk(const Parameter<T>&, const std::vector<T>&, const std::vector<T>&,   \
                         SmoothnessPolicy);                                                   \
  template Matrix<T> batch_ntk(const Parameter<T>&, const Batch<T>&, SmoothnessPolicy);       \
  template RankEquality verify_rank_equality(const Parameter<T>&, const Batch<T>&, double);   \
  template GradientReport<T> loss_gradient_in_row_space(                                      \
      const Parameter<T>&, const std::vector<Sample<T>>&, const CostGradient<T>&, double);

FUNDIM_INSTANTIATE_NTK(Rational)
FUNDIM_INSTANTIATE_NTK(double)

}  // namespace fundim
