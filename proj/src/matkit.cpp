#include "ouint/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace ouint {

namespace {

void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          ErrorCode::kDimensionMismatch, "matrix shapes differ");
}

}  // namespace

// ---------------------------------------------------------------------------
// Vector

bool Vector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

double Vector::norm_inf() const noexcept {
  double r = 0.0;
  for (double x : data_) r = std::max(r, std::abs(x));
  return r;
}

Vector& Vector::operator+=(const Vector& other) {
  require(size() == other.size(), ErrorCode::kDimensionMismatch,
          "vector sizes differ");
  for (std::size_t i = 0; i < size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require(size() == other.size(), ErrorCode::kDimensionMismatch,
          "vector sizes differ");
  for (std::size_t i = 0; i < size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector v) { return v *= s; }

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols,
                              std::vector<double> data) {
  require(data.size() == rows * cols, ErrorCode::kDimensionMismatch,
          "row-major data length differs from rows*cols");
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  require(m.all_finite(), ErrorCode::kNonFiniteEntry, "matrix entry is not finite");
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    require(row.size() == c, ErrorCode::kDimensionMismatch, "ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return from_row_major(r, c, std::move(data));
}

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> v;
  for (const auto& r : rows) v.emplace_back(r);
  return from_rows(v);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::column(const Vector& v) {
  return from_row_major(v.size(), 1, v.values());
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::symmetrized() const {
  require(is_square(), ErrorCode::kDimensionMismatch, "symmetrize needs a square matrix");
  Matrix s(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
  return s;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                     std::size_t nc) const {
  require(r0 + nr <= rows_ && c0 + nc <= cols_, ErrorCode::kDimensionMismatch,
          "block exceeds matrix bounds");
  Matrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  require(r0 + b.rows() <= rows_ && c0 + b.cols() <= cols_,
          ErrorCode::kDimensionMismatch, "block exceeds matrix bounds");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Vector Matrix::col(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Vector Matrix::diag() const {
  const std::size_t n = std::min(rows_, cols_);
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (*this)(i, i);
  return v;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

double Matrix::max_abs() const noexcept {
  double r = 0.0;
  for (double x : data_) r = std::max(r, std::abs(x));
  return r;
}

double Matrix::norm_inf() const noexcept {
  double r = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (double x : row(i)) s += std::abs(x);
    r = std::max(r, s);
  }
  return r;
}

double Matrix::norm_one() const noexcept {
  double r = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    r = std::max(r, s);
  }
  return r;
}

double Matrix::trace() const {
  require(is_square(), ErrorCode::kDimensionMismatch, "trace needs a square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::kDimensionMismatch,
          "inner dimensions differ in matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
  require(a.cols() == x.size(), ErrorCode::kDimensionMismatch,
          "matrix-vector dimensions differ");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    auto r = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Factorizations and solvers

Matrix solve_linear(const Matrix& m, const Matrix& rhs) {
  require(m.is_square(), ErrorCode::kDimensionMismatch, "solve_linear needs a square matrix");
  require(rhs.rows() == m.rows(), ErrorCode::kDimensionMismatch,
          "right-hand side rows differ from matrix size");
  const std::size_t n = m.rows();
  const std::size_t k = rhs.cols();
  const double threshold = static_cast<double>(n) * kEps * m.max_abs();

  Matrix lu = m;
  Matrix x = rhs;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
    if (std::abs(lu(piv, col)) <= threshold)
      throw Error(ErrorCode::kSingularMatrix,
                  "pivot " + std::to_string(col) + " below n*eps*max|M|");
    if (piv != col) {
      std::swap_ranges(lu.row(col).begin(), lu.row(col).end(), lu.row(piv).begin());
      std::swap_ranges(x.row(col).begin(), x.row(col).end(), x.row(piv).begin());
    }
    const double d = lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / d;
      if (f == 0.0) continue;
      lu(r, col) = f;
      for (std::size_t c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
      for (std::size_t c = 0; c < k; ++c) x(r, c) -= f * x(col, c);
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = x(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x(j, c);
      x(ii, c) = s / lu(ii, ii);
    }
  }
  return x;
}

Vector solve_linear(const Matrix& m, const Vector& rhs) {
  return solve_linear(m, Matrix::column(rhs)).col(0);
}

Matrix expm(const Matrix& m) {
  require(m.is_square(), ErrorCode::kDimensionMismatch, "expm needs a square matrix");
  const std::size_t n = m.rows();
  const double norm = m.norm_one();
  if (norm == 0.0) return Matrix::identity(n);

  const int squarings =
      std::max(0, static_cast<int>(std::ceil(std::log2(norm))) + 1);
  const Matrix scaled = std::ldexp(1.0, -squarings) * m;

  // Horner form of sum_{k=0}^{18} X^k / k!.
  constexpr int kDegree = 18;
  Matrix e = Matrix::identity(n);
  for (int k = kDegree; k >= 1; --k) {
    e = (1.0 / k) * (scaled * e);
    e += Matrix::identity(n);
  }
  for (int s = 0; s < squarings; ++s) e = e * e;
  return e;
}

namespace {

void check_symmetric(const Matrix& m) {
  require(m.is_square(), ErrorCode::kDimensionMismatch, "cholesky needs a square matrix");
  const double tol = 1e-9 * m.max_abs();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw Error(ErrorCode::kNotSymmetric, "matrix is not symmetric");
}

}  // namespace

std::optional<Matrix> try_cholesky(const Matrix& m) {
  check_symmetric(m);
  const std::size_t n = m.rows();
  const double threshold = static_cast<double>(n) * kEps * m.max_abs();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > threshold)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Matrix cholesky(const Matrix& m) {
  auto l = try_cholesky(m);
  if (!l) throw Error(ErrorCode::kNotPositiveDefinite, "cholesky pivot not positive");
  return *std::move(l);
}

Matrix psd_factor(const Matrix& m) {
  require(m.is_square(), ErrorCode::kDimensionMismatch, "psd_factor needs a square matrix");
  const std::size_t n = m.rows();
  const double threshold = 64.0 * static_cast<double>(n) * kEps * m.max_abs();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= threshold) continue;  // column stays zero
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

std::size_t rank(const Matrix& m, std::optional<double> tol) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const double threshold =
      tol.value_or(static_cast<double>(std::max(rows, cols)) * kEps * m.max_abs());
  Matrix a = m;
  std::vector<std::size_t> col_of(cols);
  std::iota(col_of.begin(), col_of.end(), 0);

  std::size_t r = 0;
  for (; r < std::min(rows, cols); ++r) {
    // Complete pivoting over the trailing block.
    std::size_t pr = r, pc = r;
    double best = -1.0;
    for (std::size_t i = r; i < rows; ++i)
      for (std::size_t j = r; j < cols; ++j)
        if (std::abs(a(i, col_of[j])) > best) {
          best = std::abs(a(i, col_of[j]));
          pr = i;
          pc = j;
        }
    if (best <= threshold) break;
    std::swap_ranges(a.row(r).begin(), a.row(r).end(), a.row(pr).begin());
    std::swap(col_of[r], col_of[pc]);
    const double d = a(r, col_of[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const double f = a(i, col_of[r]) / d;
      if (f == 0.0) continue;
      for (std::size_t j = r; j < cols; ++j) a(i, col_of[j]) -= f * a(r, col_of[j]);
    }
  }
  return r;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

Matrix principal_submatrix(const Matrix& m, std::span<const std::size_t> removed) {
  require(m.is_square(), ErrorCode::kDimensionMismatch,
          "principal_submatrix needs a square matrix");
  const std::size_t n = m.rows();
  std::vector<bool> drop(n, false);
  for (std::size_t idx : removed) {
    require(idx < n, ErrorCode::kBadCoordinate, "removed index out of range");
    drop[idx] = true;
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (!drop[i]) keep.push_back(i);
  require(!keep.empty(), ErrorCode::kEmptyResult, "every index removed");

  Matrix s(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) s(i, j) = m(keep[i], keep[j]);
  return s;
}

Matrix solve_continuous_lyapunov(const Matrix& b, const Matrix& c) {
  require(b.is_square() && c.is_square() && b.rows() == c.rows(),
          ErrorCode::kDimensionMismatch, "Lyapunov operands must be p x p");
  const std::size_t p = b.rows();
  const Matrix eye = Matrix::identity(p);
  const Matrix op = kron(eye, b) + kron(b, eye);

  // vec() stacks columns: vec(X)[i + j*p] = X(i, j).
  Matrix rhs(p * p, 1);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) rhs(i + j * p, 0) = -c(i, j);
  const Matrix v = solve_linear(op, rhs);

  Matrix x(p, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) x(i, j) = v(i + j * p, 0);

  bool symmetric = true;
  const double tol = 1e-12 * c.max_abs();
  for (std::size_t i = 0; i < p && symmetric; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (std::abs(c(i, j) - c(j, i)) > tol) {
        symmetric = false;
        break;
      }
  return symmetric ? x.symmetrized() : x;
}

}  // namespace ouint
