#pragma once

// Dense real linear algebra used throughout the library. Matrices are small
// (state dimension up to a few dozen), row-major, double precision.

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ouint/error.hpp"

namespace ouint {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();  // 2^-52

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const noexcept { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool all_finite() const noexcept;
  double norm_inf() const noexcept;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector v);
inline Vector operator*(Vector v, double s) { return s * std::move(v); }

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  /// Row-major data; throws DimensionMismatch when the length is wrong and
  /// NonFiniteEntry on NaN/Inf.
  static Matrix from_row_major(std::size_t rows, std::size_t cols,
                               std::vector<double> data);
  /// Throws DimensionMismatch on ragged input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);
  static Matrix column(const Vector& v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  /// (M + Mᵀ)/2; requires a square matrix.
  Matrix symmetrized() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr,
               std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  Vector col(std::size_t j) const;
  Vector diag() const;

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  double norm_inf() const noexcept;  // max row sum
  double norm_one() const noexcept;  // max column sum
  double trace() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix m);
inline Matrix operator*(Matrix m, double s) { return s * std::move(m); }
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

/// Solves M X = rhs by LU with partial pivoting. Throws SingularMatrix when a
/// pivot falls below n·eps·max|M|.
Matrix solve_linear(const Matrix& m, const Matrix& rhs);
Vector solve_linear(const Matrix& m, const Vector& rhs);

/// Matrix exponential by scaling and squaring around a degree-18 Taylor core.
Matrix expm(const Matrix& m);

/// Lower-triangular L with L Lᵀ = M. Throws NotSymmetric when M is not
/// symmetric to 1e-9 relative and NotPositiveDefinite when a pivot is at or
/// below n·eps·max|M|.
Matrix cholesky(const Matrix& m);
/// Same as cholesky() but reports indefiniteness as nullopt.
std::optional<Matrix> try_cholesky(const Matrix& m);

/// Factor L with L Lᵀ ≈ M for a symmetric positive semidefinite M; pivots
/// that are negligible relative to max|M| produce zero columns.
Matrix psd_factor(const Matrix& m);

/// Numerical rank by Gaussian elimination with complete pivoting. The default
/// tolerance is max(rows, cols)·eps·max|M|.
std::size_t rank(const Matrix& m, std::optional<double> tol = std::nullopt);

Matrix kron(const Matrix& a, const Matrix& b);

/// Deletes the listed rows and the same columns (0-based indices). Throws
/// EmptyResult when every index is removed and BadCoordinate on an index out
/// of range.
Matrix principal_submatrix(const Matrix& m, std::span<const std::size_t> removed);

/// Solves B X + X Bᵀ + C = 0 through the vectorized system
/// (I⊗B + B⊗I) vec(X) = -vec(C). The result is symmetrized when C is
/// symmetric. Throws SingularMatrix when some λᵢ + λⱼ vanishes numerically.
Matrix solve_continuous_lyapunov(const Matrix& b, const Matrix& c);

}  // namespace ouint
