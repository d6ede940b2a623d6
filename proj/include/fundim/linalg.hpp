#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fundim/scalar.hpp"

namespace fundim {

// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(size_t rows, size_t cols, std::vector<T> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("matrix entry count " + std::to_string(data_.size()) +
                                  " does not match shape " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_));
    }
    if constexpr (std::is_floating_point_v<T>) {
      for (const T& v : data_) {
        if (std::isnan(v)) throw std::invalid_argument("NaN entry in matrix");
      }
    }
  }

  static Matrix identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<T>& entries() const { return data_; }

  void append_row(std::span<const T> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw std::invalid_argument("append_row: width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  // Appends the rows of another matrix with the same column count.
  void append_rows(const Matrix& other) {
    for (size_t r = 0; r < other.rows(); ++r) append_row(other.row(r));
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (size_t r = 0; r < rows_; ++r)
      for (size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (size_t i = 0; i < a.rows_; ++i)
      for (size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using FloatMatrix = Matrix<double>;

inline constexpr double kDefaultRankTol = 1e-9;

// Rank over Q by Gaussian elimination. Empty matrices have rank 0.
size_t rank_exact(const RationalMatrix& m);

// Number of singular values above tol * max(rows, cols) * sigma_max.
// Throws std::domain_error on non-finite entries, std::invalid_argument on
// tol <= 0.
size_t rank_numeric(const FloatMatrix& m, double tol = kDefaultRankTol);

// True iff appending v as a row does not increase the rank.
bool row_space_contains(const RationalMatrix& m, std::span<const Rational> v);
bool row_space_contains(const FloatMatrix& m, std::span<const double> v,
                        double tol = kDefaultRankTol);

// Rank of m with the backend matching its scalar type.
inline size_t rank_of(const RationalMatrix& m, double /*tol*/ = kDefaultRankTol) {
  return rank_exact(m);
}
inline size_t rank_of(const FloatMatrix& m, double tol = kDefaultRankTol) {
  return rank_numeric(m, tol);
}

FloatMatrix to_float(const RationalMatrix& m);

// Incrementally maintained reduced row basis over Q. Adding a row costs
// O(rank * cols).
class RationalRowBasis {
 public:
  explicit RationalRowBasis(size_t cols) : cols_(cols) {}

  // Returns true if the row was independent of the rows added so far.
  bool add(std::span<const Rational> row);
  size_t rank() const { return rows_.size(); }
  size_t cols() const { return cols_; }

 private:
  size_t cols_;
  std::vector<std::vector<Rational>> rows_;  // each normalised: pivot entry == 1
  std::vector<size_t> pivots_;
};

}  // namespace fundim
