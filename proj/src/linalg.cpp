#include "fundim/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>

namespace fundim {

size_t rank_exact(const RationalMatrix& m) {
  if (m.empty()) return 0;
  // Eliminate over whichever orientation has fewer rows to reduce.
  RationalMatrix a = m.rows() <= m.cols() ? m : m.transpose();
  const size_t rows = a.rows();
  const size_t cols = a.cols();
  size_t rank = 0;
  Rational factor;
  for (size_t c = 0; c < cols && rank < rows; ++c) {
    size_t pivot = rows;
    for (size_t r = rank; r < rows; ++r) {
      if (sgn(a(r, c)) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == rows) continue;
    if (pivot != rank) {
      for (size_t k = c; k < cols; ++k) std::swap(a(pivot, k), a(rank, k));
    }
    for (size_t r = rank + 1; r < rows; ++r) {
      if (sgn(a(r, c)) == 0) continue;
      factor = a(r, c) / a(rank, c);
      for (size_t k = c; k < cols; ++k) a(r, k) -= factor * a(rank, k);
    }
    ++rank;
  }
  return rank;
}

size_t rank_numeric(const FloatMatrix& m, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("rank_numeric: tol must be positive");
  for (double v : m.entries()) {
    if (!std::isfinite(v)) throw std::domain_error("rank_numeric: non-finite entry");
  }
  if (m.empty()) return 0;
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold =
      tol * static_cast<double>(std::max(m.rows(), m.cols())) * sv(0);
  size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return rank;
}

bool row_space_contains(const RationalMatrix& m, std::span<const Rational> v) {
  if (v.size() != m.cols() && !(m.rows() == 0 && m.cols() == 0)) {
    throw std::invalid_argument("row_space_contains: dimension mismatch");
  }
  RationalRowBasis basis(v.size());
  for (size_t r = 0; r < m.rows(); ++r) basis.add(m.row(r));
  return !basis.add(v);
}

bool row_space_contains(const FloatMatrix& m, std::span<const double> v, double tol) {
  if (v.size() != m.cols() && !(m.rows() == 0 && m.cols() == 0)) {
    throw std::invalid_argument("row_space_contains: dimension mismatch");
  }
  FloatMatrix extended = m;
  extended.append_row(v);
  return rank_numeric(extended, tol) == rank_numeric(m, tol);
}

FloatMatrix to_float(const RationalMatrix& m) {
  std::vector<double> entries;
  entries.reserve(m.entries().size());
  for (const auto& q : m.entries()) entries.push_back(q.get_d());
  return FloatMatrix(m.rows(), m.cols(), std::move(entries));
}

bool RationalRowBasis::add(std::span<const Rational> row) {
  if (row.size() != cols_) throw std::invalid_argument("RationalRowBasis: width mismatch");
  std::vector<Rational> work(row.begin(), row.end());
  Rational factor;
  for (size_t i = 0; i < rows_.size(); ++i) {
    const size_t p = pivots_[i];
    if (sgn(work[p]) == 0) continue;
    factor = work[p];
    const auto& basis_row = rows_[i];
    for (size_t k = p; k < cols_; ++k) {
      if (sgn(basis_row[k]) != 0) work[k] -= factor * basis_row[k];
    }
  }
  size_t pivot = cols_;
  for (size_t k = 0; k < cols_; ++k) {
    if (sgn(work[k]) != 0) {
      pivot = k;
      break;
    }
  }
  if (pivot == cols_) return false;
  const Rational lead = work[pivot];
  for (size_t k = pivot; k < cols_; ++k) {
    if (sgn(work[k]) != 0) work[k] /= lead;
  }
  rows_.push_back(std::move(work));
  pivots_.push_back(pivot);
  return true;
}

}  // namespace fundim
