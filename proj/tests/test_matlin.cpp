#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "ics/error.hpp"
#include "ics/matlin.hpp"
#include "support/bridge.hpp"

using namespace ics;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an ics::Error";
  return Errc::InvalidArgument;
}

Matrix random_symmetric(std::mt19937_64& gen, std::size_t n) {
  const auto b = oracle::random_matrix(gen, n, n);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (b[i][j] + b[j][i]);
  return a;
}

}  // namespace

TEST(Cholesky, KnownFactor) {
  const Matrix l = cholesky(Matrix::from_rows({{4, 2}, {2, 3}}));
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 1.0);
  EXPECT_NEAR(l(1, 1), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(l(0, 1), 0.0);
}

TEST(Cholesky, ReconstructsRandomSpd) {
  std::mt19937_64 gen(11);
  for (std::size_t p : {1u, 3u, 8u, 20u}) {
    const Matrix a = bridge::to_matrix(oracle::random_spd(gen, p));
    const Matrix l = cholesky(a);
    EXPECT_LE(max_abs_diff(l * l.transpose(), a), 1e-12 * a.max_abs());
  }
}

TEST(Cholesky, RejectsIndefiniteAndSingular) {
  EXPECT_EQ(code_of([] { cholesky(Matrix::from_rows({{1, 2}, {2, 1}})); }), Errc::NotPositiveDefinite);
  EXPECT_EQ(code_of([] { cholesky(Matrix::from_rows({{1, 1}, {1, 1}})); }), Errc::NotPositiveDefinite);
  EXPECT_EQ(code_of([] { SpdMatrix(Matrix(2, 3)); }), Errc::DimensionMismatch);
}

TEST(SpdMatrix, SolveAndDeterminantMatchOracle) {
  std::mt19937_64 gen(12);
  const auto a = oracle::random_spd(gen, 6);
  const SpdMatrix s(bridge::to_matrix(a));
  EXPECT_NEAR(s.determinant(), oracle::det(a), 1e-9 * std::abs(oracle::det(a)));
  const std::vector<double> b{1, -2, 3, 0.5, 0, 4};
  const auto x = s.solve(b);
  const auto inv = oracle::inverse(a);
  for (std::size_t i = 0; i < 6; ++i) {
    double expect = 0.0;
    for (std::size_t j = 0; j < 6; ++j) expect += inv[i][j] * b[j];
    EXPECT_NEAR(x[i], expect, 1e-12 * (1.0 + std::abs(expect)));
  }
  EXPECT_NEAR(s.inverse_quadratic_form(b), oracle::quad_form(inv, b), 1e-10);
}

TEST(SymEig, DiagonalInputIsExact) {
  const std::vector<double> d{1.0, 5.0, 3.0};
  const SymEig e = sym_eig(Matrix::diagonal(d));
  EXPECT_EQ(e.values, (std::vector<double>{5.0, 3.0, 1.0}));
}

TEST(SymEig, TwoByTwoClosedForm) {
  const SymEig e = sym_eig(Matrix::from_rows({{2, 1}, {1, 2}}));
  EXPECT_NEAR(e.values[0], 3.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
  // Leading eigenvector (1, 1) / sqrt(2) with a positive largest entry.
  EXPECT_NEAR(e.vectors(0, 0), 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(e.vectors(1, 0), 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(SymEig, MatchesCharacteristicPolynomialRoots) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = random_symmetric(gen, 4);
    const auto expect = oracle::charpoly_eigenvalues(bridge::to_oracle(a));
    const SymEig e = sym_eig(a);
    ASSERT_EQ(expect.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(e.values[i], expect[i], 1e-9);
  }
}

TEST(SymEig, DecompositionProperties) {
  std::mt19937_64 gen(14);
  for (std::size_t n : {2u, 5u, 12u, 30u}) {
    const Matrix a = random_symmetric(gen, n);
    const SymEig e = sym_eig(a);
    EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
    EXPECT_LE(max_abs_diff(transpose_times(e.vectors, e.vectors), Matrix::identity(n)), 1e-12);
    const Matrix recon = e.vectors * Matrix::diagonal(e.values) * e.vectors.transpose();
    EXPECT_LE(max_abs_diff(recon, a), 1e-12 * (1.0 + a.max_abs()));
    double trace = 0.0;
    for (double v : e.values) trace += v;
    EXPECT_NEAR(trace, a.trace(), 1e-12 * n);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t arg = 0;
      for (std::size_t r = 1; r < n; ++r)
        if (std::abs(e.vectors(r, c)) > std::abs(e.vectors(arg, c))) arg = r;
      EXPECT_GT(e.vectors(arg, c), 0.0);
    }
  }
}

TEST(SymEig, ReportsNoConvergence) {
  std::mt19937_64 gen(15);
  JacobiOptions opt;
  opt.max_sweeps = 1;
  EXPECT_EQ(code_of([&] { sym_eig(random_symmetric(gen, 10), opt); }), Errc::NoConvergence);
}

TEST(SpdFunctions, InverseAndInverseSqrt) {
  std::mt19937_64 gen(16);
  const SpdMatrix a(bridge::to_matrix(oracle::random_spd(gen, 7)));
  const SpdMatrix inv = spd_inverse(a);
  EXPECT_LE(max_abs_diff(a.matrix() * inv.matrix(), Matrix::identity(7)), 1e-12);
  const SpdMatrix w = spd_inv_sqrt(a);
  EXPECT_LE(max_abs_diff(w.matrix() * a.matrix() * w.matrix(), Matrix::identity(7)), 1e-12);
}

TEST(GenEig, MatchesDeterminantRoots) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 4; ++trial) {
    const auto v1 = oracle::random_spd(gen, 3);
    const auto v2 = oracle::random_spd(gen, 3);
    const GenEig e = gen_eig(SpdMatrix(bridge::to_matrix(v1)), SpdMatrix(bridge::to_matrix(v2)));
    const auto expect = oracle::generalized_eigenvalues(v1, v2, 1.5 * e.values[0] + 1.0);
    ASSERT_EQ(expect.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(e.values[i], expect[i], 1e-8 * (1.0 + expect[i]));
  }
}

TEST(GenEig, SimultaneousDiagonalization) {
  std::mt19937_64 gen(18);
  for (std::size_t p : {2u, 5u, 10u, 20u}) {
    const SpdMatrix v1(bridge::to_matrix(oracle::random_spd(gen, p)));
    const SpdMatrix v2(bridge::to_matrix(oracle::random_spd(gen, p)));
    const GenEig e = gen_eig(v1, v2);
    EXPECT_LE(max_abs_diff(transpose_times(e.h, v1.matrix() * e.h), Matrix::identity(p)), 1e-10);
    EXPECT_LE(max_abs_diff(transpose_times(e.h, v2.matrix() * e.h), Matrix::diagonal(e.values)),
              1e-10 * e.values[0]);
    EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
  }
}

TEST(GenEig, IdenticalScattersGiveUnitSpectrum) {
  std::mt19937_64 gen(19);
  const SpdMatrix v(bridge::to_matrix(oracle::random_spd(gen, 5)));
  for (double rho : gen_eig(v, v).values) EXPECT_NEAR(rho, 1.0, 1e-12);
}

TEST(GenEig, DimensionMismatch) {
  EXPECT_EQ(code_of([] { gen_eig(SpdMatrix(Matrix::identity(2)), SpdMatrix(Matrix::identity(3))); }),
            Errc::DimensionMismatch);
}
