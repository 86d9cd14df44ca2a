#pragma once

// Dense symmetric linear algebra used by every estimator and population engine.
// Everything here is O(p^3) and sized for the small dimensions (p <= ~50) of
// invariant-coordinate work; there are no external kernels.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ics {

/// Real dense matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }
  std::vector<double> col(std::size_t c) const;

  std::span<const double> values() const noexcept { return values_; }

  Matrix transpose() const;
  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  double trace() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// a^T * b without forming the transpose.
Matrix transpose_times(const Matrix& a, const Matrix& b);

/// Largest entrywise |a - b|; matrices must have equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Symmetric positive-definite matrix. Construction symmetrizes the input
/// ((a + a^T) / 2) and proves definiteness with a Cholesky factorization,
/// which is kept for solves, inverses and determinants.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& a);

  std::size_t dim() const noexcept { return a_.rows(); }
  const Matrix& matrix() const noexcept { return a_; }
  const Matrix& cholesky_factor() const noexcept { return chol_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return a_(r, c); }

  double log_determinant() const noexcept;
  double determinant() const noexcept;

  /// Solves a x = b via the stored factor.
  std::vector<double> solve(std::span<const double> b) const;
  /// x^T a^{-1} x.
  double inverse_quadratic_form(std::span<const double> x) const;

 private:
  Matrix a_;
  Matrix chol_;
};

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct SymEig {
  std::vector<double> values;
  Matrix vectors;
};

/// Descending generalized eigenvalues of (v1, v2) and H with H^T v1 H = I,
/// H^T v2 H = diag(values).
struct GenEig {
  std::vector<double> values;
  Matrix h;
};

struct JacobiOptions {
  int max_sweeps = 100;
};

/// Lower-triangular L with L L^T = a. Throws NotPositiveDefinite when a pivot
/// falls to dim * eps * ||a||_F or below.
Matrix cholesky(const Matrix& a);
Matrix cholesky(const SpdMatrix& a);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymEig sym_eig(const Matrix& a, JacobiOptions options = {});

SpdMatrix spd_inverse(const SpdMatrix& a);
SpdMatrix spd_inv_sqrt(const SpdMatrix& a);

/// Simultaneous diagonalization through whitening: W = v1^{-1/2},
/// U diag(rho) U^T = W v2 W, H = W U.
GenEig gen_eig(const SpdMatrix& v1, const SpdMatrix& v2);

/// Flips each column so that its largest-magnitude entry is positive. Ties go to
/// the first such entry.
void normalize_column_signs(Matrix& m);

}  // namespace ics
