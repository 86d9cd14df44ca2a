#pragma once

// Reference computations for tests. These deliberately avoid the library's
// kernels: determinants by LU with partial pivoting, inverses by Gauss-Jordan,
// estimators by their textbook formulas, and std::mt19937_64 for randomness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, std::vector<double>(c, 0.0)); }

inline double det(Mat a) {
  const std::size_t n = a.size();
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return d;
}

inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) throw std::runtime_error("oracle: singular matrix");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    const double s = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= s;
      inv[c][j] /= s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

inline Mat multiply(const Mat& a, const Mat& b) {
  Mat c = zeros(a.size(), b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat transpose(const Mat& a) {
  Mat t = zeros(a[0].size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline double quad_form(const Mat& m, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) s += x[i] * m[i][j] * x[j];
  return s;
}

// Roots of f on [lo, hi] located by sign changes on a fine grid, then bisection.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                      std::size_t cells = 20000) {
  std::vector<double> roots;
  double a = lo;
  double fa = f(a);
  for (std::size_t i = 1; i <= cells; ++i) {
    const double b = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    const double fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (x0 + x1);
        const double fm = f(m);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

// Eigenvalues of a symmetric matrix as the roots of det(A - lambda I), descending.
inline std::vector<double> charpoly_eigenvalues(const Mat& a, std::size_t cells = 200000) {
  const std::size_t n = a.size();
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::abs(a[i][j]);
    radius = std::max(radius, r);
  }
  auto f = [&](double lambda) {
    Mat m = a;
    for (std::size_t i = 0; i < n; ++i) m[i][i] -= lambda;
    return det(m);
  };
  auto roots = scan_roots(f, -radius - 1.0, radius + 1.0, cells);
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

// Generalized eigenvalues: roots of det(v2 - rho v1), descending.
inline std::vector<double> generalized_eigenvalues(const Mat& v1, const Mat& v2, double hi,
                                                   std::size_t cells = 200000) {
  const std::size_t n = v1.size();
  auto f = [&](double rho) {
    Mat m = v2;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i][j] -= rho * v1[i][j];
    return det(m);
  };
  auto roots = scan_roots(f, 0.0, hi, cells);
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

// ---- textbook estimators over row-major data -------------------------------

struct Data {
  std::size_t n = 0, p = 0;
  std::vector<double> v;  // row-major
  double operator()(std::size_t i, std::size_t j) const { return v[i * p + j]; }
};

inline std::vector<double> mean(const Data& x, const std::vector<std::size_t>& rows) {
  std::vector<double> m(x.p, 0.0);
  for (std::size_t i : rows)
    for (std::size_t j = 0; j < x.p; ++j) m[j] += x(i, j);
  for (double& v : m) v /= static_cast<double>(rows.size());
  return m;
}

inline std::vector<std::size_t> all_rows(const Data& x) {
  std::vector<std::size_t> r(x.n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

inline Mat covariance(const Data& x, const std::vector<std::size_t>& rows) {
  const auto m = mean(x, rows);
  Mat c = zeros(x.p, x.p);
  for (std::size_t i : rows)
    for (std::size_t a = 0; a < x.p; ++a)
      for (std::size_t b = 0; b < x.p; ++b) c[a][b] += (x(i, a) - m[a]) * (x(i, b) - m[b]);
  for (auto& row : c)
    for (double& v : row) v /= static_cast<double>(rows.size());
  return c;
}

inline std::vector<double> centered_row(const Data& x, std::size_t i, const std::vector<double>& m) {
  std::vector<double> y(x.p);
  for (std::size_t j = 0; j < x.p; ++j) y[j] = x(i, j) - m[j];
  return y;
}

inline Mat cov4(const Data& x) {
  const auto rows = all_rows(x);
  const auto m = mean(x, rows);
  const Mat inv = inverse(covariance(x, rows));
  Mat c = zeros(x.p, x.p);
  for (std::size_t i = 0; i < x.n; ++i) {
    const auto y = centered_row(x, i, m);
    const double d2 = quad_form(inv, y);
    for (std::size_t a = 0; a < x.p; ++a)
      for (std::size_t b = 0; b < x.p; ++b) c[a][b] += d2 * y[a] * y[b];
  }
  const double s = 1.0 / (static_cast<double>(x.n) * static_cast<double>(x.p + 2));
  for (auto& row : c)
    for (double& v : row) v *= s;
  return c;
}

inline Mat cov_axis(const Data& x) {
  const auto rows = all_rows(x);
  const auto m = mean(x, rows);
  const Mat inv = inverse(covariance(x, rows));
  Mat c = zeros(x.p, x.p);
  for (std::size_t i = 0; i < x.n; ++i) {
    const auto y = centered_row(x, i, m);
    const double d2 = quad_form(inv, y);
    for (std::size_t a = 0; a < x.p; ++a)
      for (std::size_t b = 0; b < x.p; ++b) c[a][b] += y[a] * y[b] / d2;
  }
  const double s = static_cast<double>(x.p) / static_cast<double>(x.n);
  for (auto& row : c)
    for (double& v : row) v *= s;
  return c;
}

inline Mat tcov(const Data& x, double beta) {
  const Mat inv = inverse(covariance(x, all_rows(x)));
  Mat c = zeros(x.p, x.p);
  double wsum = 0.0;
  std::vector<double> y(x.p);
  for (std::size_t i = 0; i < x.n; ++i) {
    for (std::size_t j = i + 1; j < x.n; ++j) {
      for (std::size_t a = 0; a < x.p; ++a) y[a] = x(i, a) - x(j, a);
      const double w = std::exp(-0.5 * beta * quad_form(inv, y));
      wsum += w;
      for (std::size_t a = 0; a < x.p; ++a)
        for (std::size_t b = 0; b < x.p; ++b) c[a][b] += w * y[a] * y[b];
    }
  }
  for (auto& row : c)
    for (double& v : row) v /= 2.0 * wsum;
  return c;
}

// Raw MCD by enumerating every h-subset.
struct McdOracle {
  std::vector<std::size_t> subset;
  double determinant = std::numeric_limits<double>::infinity();
};

inline McdOracle mcd_brute_force(const Data& x, std::size_t h) {
  McdOracle best;
  std::vector<bool> pick(x.n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(h), true);
  do {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < x.n; ++i)
      if (pick[i]) rows.push_back(i);
    const double d = det(covariance(x, rows));
    if (d < best.determinant) {
      best.determinant = d;
      best.subset = rows;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// ---- random helpers ----------------------------------------------------------

inline Data random_data(std::mt19937_64& gen, std::size_t n, std::size_t p) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Data x{n, p, std::vector<double>(n * p)};
  // Mildly skewed and correlated columns so every estimator differs from COV.
  for (std::size_t i = 0; i < n; ++i) {
    double prev = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double e = z(gen);
      const double v = e + 0.5 * prev + 0.3 * e * e + 0.2 * u(gen);
      x.v[i * p + j] = v;
      prev = v;
    }
  }
  return x;
}

inline Mat random_matrix(std::mt19937_64& gen, std::size_t r, std::size_t c) {
  std::normal_distribution<double> z;
  Mat m = zeros(r, c);
  for (auto& row : m)
    for (double& v : row) v = z(gen);
  return m;
}

inline Mat random_spd(std::mt19937_64& gen, std::size_t p) {
  const Mat b = random_matrix(gen, p, p);
  Mat s = multiply(b, transpose(b));
  for (std::size_t i = 0; i < p; ++i) s[i][i] += static_cast<double>(p);
  return s;
}

inline std::vector<double> random_proportions(std::mt19937_64& gen, std::size_t k, double floor = 0.02) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(k);
  double s = 0.0;
  for (double& v : a) s += (v = floor + u(gen));
  for (double& v : a) v /= s;
  return a;
}

// ---- 1-D quadrature ----------------------------------------------------------

// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

}  // namespace oracle
