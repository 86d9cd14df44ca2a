#include "ics/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ics/error.hpp"

namespace ics {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

void require_square(const Matrix& a, const char* what) {
  if (!a.is_square() || a.empty()) {
    throw Error(Errc::DimensionMismatch, std::string(what) + ": matrix must be square");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw Error(Errc::DimensionMismatch, "matrix dimensions must be positive");
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), values_(std::move(row_major)) {
  if (rows == 0 || cols == 0) {
    throw Error(Errc::DimensionMismatch, "matrix dimensions must be positive");
  }
  if (values_.size() != rows * cols) {
    throw Error(Errc::DimensionMismatch, "value count does not match matrix shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(Errc::DimensionMismatch, "ragged row list");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(values));
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> Matrix::col(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

double Matrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::trace() const {
  require_square(*this, "trace");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "matrix sum");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "matrix difference");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(Errc::DimensionMismatch, "matrix product: inner dimensions differ");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(Errc::DimensionMismatch, "matrix-vector product: sizes differ");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    y[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
  }
  return y;
}

Matrix transpose_times(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(Errc::DimensionMismatch, "transpose_times: row counts differ");
  }
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto a_row = a.row(k);
    auto b_row = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a_row[i];
      if (aki == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
    }
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

Matrix cholesky(const Matrix& a) {
  require_square(a, "cholesky");
  const std::size_t n = a.rows();
  const double tol =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.frobenius_norm();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol)) {
      throw Error(Errc::NotPositiveDefinite,
                  "pivot " + std::to_string(j) + " is " + std::to_string(d));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Matrix cholesky(const SpdMatrix& a) { return a.cholesky_factor(); }

SpdMatrix::SpdMatrix(const Matrix& a) {
  require_square(a, "SpdMatrix");
  if (!a.all_finite()) throw Error(Errc::InvalidArgument, "SpdMatrix: non-finite entry");
  const std::size_t n = a.rows();
  a_ = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a_(i, i) = a(i, i);
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a_(i, j) = v;
      a_(j, i) = v;
    }
  }
  chol_ = cholesky(a_);
}

double SpdMatrix::log_determinant() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::log(chol_(i, i));
  return 2.0 * s;
}

double SpdMatrix::determinant() const noexcept {
  double d = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) d *= chol_(i, i);
  return d * d;
}

std::vector<double> SpdMatrix::solve(std::span<const double> b) const {
  const std::size_t n = dim();
  if (b.size() != n) throw Error(Errc::DimensionMismatch, "solve: right-hand side size");
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol_(i, k) * y[k];
    y[i] = s / chol_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= chol_(k, ii) * y[k];
    y[ii] = s / chol_(ii, ii);
  }
  return y;
}

double SpdMatrix::inverse_quadratic_form(std::span<const double> x) const {
  const std::size_t n = dim();
  if (x.size() != n) throw Error(Errc::DimensionMismatch, "quadratic form: vector size");
  // ||L^{-1} x||^2
  double acc = 0.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol_(i, k) * y[k];
    y[i] = s / chol_(i, i);
    acc += y[i] * y[i];
  }
  return acc;
}

void normalize_column_signs(Matrix& m) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double v = std::abs(m(r, c));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (m(best, c) < 0.0) {
      for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = -m(r, c);
    }
  }
}

SymEig sym_eig(const Matrix& input, JacobiOptions options) {
  require_square(input, "sym_eig");
  if (!input.all_finite()) throw Error(Errc::InvalidArgument, "sym_eig: non-finite entry");
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += std::abs(a(i, j));
    }
    return s;
  };

  bool converged = false;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const double off = off_diagonal();
    if (off == 0.0) {
      converged = true;
      break;
    }
    // Small rotations are skipped during the first sweeps; later, entries that
    // no longer change the diagonal in floating point are set to zero.
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= threshold || apq == 0.0) continue;

        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double new_kp = akp - s * (akq + tau * akp);
          const double new_kq = akq + s * (akp - tau * akq);
          a(k, p) = new_kp;
          a(p, k) = new_kp;
          a(k, q) = new_kq;
          a(q, k) = new_kq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }
  if (!converged && off_diagonal() != 0.0) {
    throw Error(Errc::NoConvergence,
                "Jacobi did not converge in " + std::to_string(options.max_sweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymEig out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  normalize_column_signs(out.vectors);
  return out;
}

namespace {

// Q f(Lambda) Q^T for the eigen-decomposition of an SPD matrix.
Matrix spectral_map(const SpdMatrix& a, double (*f)(double)) {
  const SymEig e = sym_eig(a.matrix());
  const std::size_t n = a.dim();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const double qik = e.vectors(i, k) * fk;
      if (qik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += qik * e.vectors(j, k);
    }
  }
  return out;
}

}  // namespace

SpdMatrix spd_inverse(const SpdMatrix& a) {
  const std::size_t n = a.dim();
  Matrix inv(n, n);
  std::vector<double> unit(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    unit[c] = 1.0;
    const std::vector<double> x = a.solve(unit);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = x[r];
    unit[c] = 0.0;
  }
  return SpdMatrix(inv);
}

SpdMatrix spd_inv_sqrt(const SpdMatrix& a) {
  return SpdMatrix(spectral_map(a, [](double x) { return 1.0 / std::sqrt(x); }));
}

GenEig gen_eig(const SpdMatrix& v1, const SpdMatrix& v2) {
  if (v1.dim() != v2.dim()) {
    throw Error(Errc::DimensionMismatch, "gen_eig: scatter dimensions differ");
  }
  const Matrix w = spd_inv_sqrt(v1).matrix();
  const Matrix m = w * v2.matrix() * w;
  // m is symmetric up to rounding; sym_eig reads both triangles, so average them.
  Matrix sym = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      sym(i, j) = v;
      sym(j, i) = v;
    }
  }
  SymEig e = sym_eig(sym);
  GenEig out{std::move(e.values), w * e.vectors};
  normalize_column_signs(out.h);
  return out;
}

}  // namespace ics
