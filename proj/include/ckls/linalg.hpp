#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ckls/error.hpp"
#include "ckls/rational.hpp"

namespace ckls {

class RatVector {
public:
  RatVector() = default;
  explicit RatVector(std::size_t dim) : entries_(dim) {}
  RatVector(std::initializer_list<Rational> values) : entries_(values) {}
  explicit RatVector(std::vector<Rational> values) : entries_(std::move(values)) {}

  static RatVector unit(std::size_t dim, std::size_t i) {
    RatVector v(dim);
    v[i] = 1;
    return v;
  }

  std::size_t dim() const noexcept { return entries_.size(); }
  Rational& operator[](std::size_t i) { return entries_[i]; }
  const Rational& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const std::vector<Rational>& entries() const noexcept { return entries_; }

  bool is_zero() const {
    for (const auto& q : entries_)
      if (!q.is_zero()) return false;
    return true;
  }

  RatVector& operator+=(const RatVector& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] += o[i];
    return *this;
  }
  RatVector& operator-=(const RatVector& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] -= o[i];
    return *this;
  }
  RatVector& operator*=(const Rational& s) {
    for (auto& q : entries_) q *= s;
    return *this;
  }

  friend RatVector operator+(RatVector a, const RatVector& b) { return a += b; }
  friend RatVector operator-(RatVector a, const RatVector& b) { return a -= b; }
  friend RatVector operator*(RatVector a, const Rational& s) { return a *= s; }
  friend RatVector operator*(const Rational& s, RatVector a) { return a *= s; }
  RatVector operator-() const { return *this * Rational(-1); }

  friend bool operator==(const RatVector&, const RatVector&) = default;

  Rational dot(const RatVector& o) const {
    require_same_dim(o);
    Rational s;
    for (std::size_t i = 0; i < dim(); ++i) s += entries_[i] * o[i];
    return s;
  }

  /// Float approximation of the Euclidean norm; diagnostics only.
  double norm2() const;

private:
  void require_same_dim(const RatVector& o) const {
    if (o.dim() != dim())
      throw DimensionMismatch("vector dimensions " + std::to_string(dim()) + " and " +
                              std::to_string(o.dim()));
  }

  std::vector<Rational> entries_;
};

/// Row-major dense rational matrix.
class RatMatrix {
public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  RatMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static RatMatrix identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RatVector row(std::size_t i) const {
    RatVector v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
  }
  RatVector col(std::size_t j) const {
    RatVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  RatMatrix transpose() const {
    RatMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    for (const auto& q : data_)
      if (!q.is_zero()) return false;
    return true;
  }

  RatMatrix& operator+=(const RatMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  RatMatrix& operator*=(const Rational& s) {
    for (auto& q : data_) q *= s;
    return *this;
  }
  friend RatMatrix operator+(RatMatrix a, const RatMatrix& b) { return a += b; }
  friend RatMatrix operator*(RatMatrix a, const Rational& s) { return a *= s; }
  friend RatMatrix operator*(const Rational& s, RatMatrix a) { return a *= s; }

  friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product shape mismatch");
    RatMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend RatVector operator*(const RatMatrix& a, const RatVector& x) {
    if (a.cols_ != x.dim()) throw DimensionMismatch("matrix-vector shape mismatch");
    RatVector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend bool operator==(const RatMatrix&, const RatMatrix&) = default;

private:
  void require_same_shape(const RatMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionMismatch("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// A·particular = b, and A·v = 0 for each nullspace vector.
struct LinearSolution {
  RatVector particular;
  std::vector<RatVector> nullspace_basis;
};

/// The system A·x = b has no solution. `witness` solves the normal-projected
/// system Aᵀ·A·x = Aᵀ·b and `residual` = b − A·witness.
class Inconsistent : public Error {
public:
  Inconsistent(RatVector residual, RatVector witness)
      : Error("inconsistent linear system"),
        residual_(std::move(residual)),
        witness_(std::move(witness)) {}

  const RatVector& residual() const noexcept { return residual_; }
  const RatVector& witness() const noexcept { return witness_; }

private:
  RatVector residual_;
  RatVector witness_;
};

namespace detail {

// In-place reduced row echelon form over the first `pivot_cols` columns.
// Pivot = first nonzero entry at or below the current row. Returns pivot
// column indices in row order.
inline std::vector<std::size_t> rref(RatMatrix& m, std::size_t pivot_cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < pivot_cols && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    const Rational inv = Rational(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      const Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline RatMatrix augment(const RatMatrix& a, const RatMatrix& b) {
  RatMatrix m(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

inline RatMatrix column(const RatVector& v) {
  RatMatrix m(v.dim(), 1);
  for (std::size_t i = 0; i < v.dim(); ++i) m(i, 0) = v[i];
  return m;
}

// Solution of an augmented system already in RREF; nullopt if inconsistent.
inline std::optional<LinearSolution> read_solution(const RatMatrix& m, std::size_t n,
                                                   const std::vector<std::size_t>& pivots) {
  for (std::size_t i = pivots.size(); i < m.rows(); ++i)
    if (!m(i, n).is_zero()) return std::nullopt;

  LinearSolution sol{RatVector(n), {}};
  for (std::size_t r = 0; r < pivots.size(); ++r) sol.particular[pivots[r]] = m(r, n);

  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    RatVector v(n);
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, f);
    sol.nullspace_basis.push_back(std::move(v));
  }
  return sol;
}

}  // namespace detail

inline double RatVector::norm2() const {
  double s = 0;
  for (const auto& q : entries_) {
    const double d = q.to_double();
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::size_t rank(const RatMatrix& a) {
  RatMatrix m = a;
  return detail::rref(m, m.cols()).size();
}

inline RatMatrix mat_inverse(const RatMatrix& a) {
  if (!a.is_square()) throw DimensionMismatch("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  RatMatrix m = detail::augment(a, RatMatrix::identity(n));
  const auto pivots = detail::rref(m, n);
  if (pivots.size() < n) throw Singular("matrix is singular", pivots.size());
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = m(i, n + j);
  return inv;
}

inline RatVector solve_square(const RatMatrix& a, const RatVector& b) {
  if (!a.is_square()) throw DimensionMismatch("solve_square needs a square matrix");
  if (b.dim() != a.rows()) throw DimensionMismatch("right-hand side has wrong dimension");
  const std::size_t n = a.rows();
  RatMatrix m = detail::augment(a, detail::column(b));
  const auto pivots = detail::rref(m, n);
  if (pivots.size() < n) throw Singular("matrix is singular", pivots.size());
  RatVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m(i, n);
  return x;
}

/// Particular solution plus nullspace basis of A·x = b; throws Inconsistent.
inline LinearSolution solve_general(const RatMatrix& a, const RatVector& b) {
  if (b.dim() != a.rows()) throw DimensionMismatch("right-hand side has wrong dimension");
  const std::size_t n = a.cols();
  RatMatrix m = detail::augment(a, detail::column(b));
  const auto pivots = detail::rref(m, n);
  if (auto sol = detail::read_solution(m, n, pivots)) return std::move(*sol);

  // AᵀA·x = Aᵀb is always consistent.
  const RatMatrix at = a.transpose();
  RatMatrix normal = detail::augment(at * a, detail::column(at * b));
  const auto normal_pivots = detail::rref(normal, n);
  RatVector witness = detail::read_solution(normal, n, normal_pivots)->particular;
  RatVector residual = b - a * witness;
  throw Inconsistent(std::move(residual), std::move(witness));
}

}  // namespace ckls
