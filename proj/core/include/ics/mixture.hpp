#pragma once

// Exact population-level COV / COV4 and their ICS spectra for two mixture
// families:
//   GaussianUnitWithin:  sum_j alpha_j N_p(t_j, I_p), centers spanning the first q axes
//   Dirac:               sum_j alpha_j delta_{t_j} in q = p dimensions

#include <array>
#include <cstddef>
#include <vector>

#include "ics/matlin.hpp"

namespace ics::theory {

enum class Family { GaussianUnitWithin, Dirac };

class MixtureSpec {
 public:
  /// centers: p x k, column j is t_j. Rows q..p-1 of the centered centers must
  /// vanish and the first q rows must have rank q.
  static MixtureSpec gaussian(std::vector<double> proportions, Matrix centers, std::size_t q);
  /// centers: q x k. Rank is checked by the Dirac engines (Singular).
  static MixtureSpec dirac(std::vector<double> proportions, Matrix centers);

  Family family() const noexcept { return family_; }
  std::size_t k() const noexcept { return proportions_.size(); }
  std::size_t p() const noexcept { return centers_.rows(); }
  std::size_t q() const noexcept { return q_; }
  const std::vector<double>& proportions() const noexcept { return proportions_; }
  const Matrix& centers() const noexcept { return centers_; }

  /// t_j - sum_l alpha_l t_l, same shape as centers().
  Matrix centered_centers() const;

 private:
  MixtureSpec(Family family, std::vector<double> proportions, Matrix centers, std::size_t q);

  Family family_;
  std::vector<double> proportions_;
  Matrix centers_;
  std::size_t q_;
};

/// Checks positivity and unit sum (to 1e-12) and renormalizes; throws InvalidSpec.
std::vector<double> validate_proportions(std::vector<double> proportions);

/// Raw moments E[X^order] of N(mu, sigma^2), order 1..4.
double gauss_moment(int order, double mu, double sigma);

SpdMatrix gauss_pop_cov(const MixtureSpec& spec);
SpdMatrix gauss_pop_cov4(const MixtureSpec& spec);
/// Descending eigenvalues of COV^{-1} COV4; at least p - q of them equal 1.
std::vector<double> gauss_pop_ics(const MixtureSpec& spec);

SpdMatrix dirac_pop_cov(const MixtureSpec& spec);
SpdMatrix dirac_pop_cov4(const MixtureSpec& spec);
std::vector<double> dirac_pop_ics(const MixtureSpec& spec);

/// Closed-form two-point spectrum (a^3 + b^3) / (3ab), b = 1 - a.
double dirac_two_group_rho(double alpha1);

/// Gaussian-engine eigenvalue predicted for a well separated mixture from the
/// Dirac eigenvalue of the same proportions: ((q+2) rho + p - q) / (p + 2).
double gaussian_separation_limit(double dirac_rho, std::size_t p, std::size_t q);

/// True when every eigenvalue is within tol (relative to 1) of one.
bool all_equal_one(const std::vector<double>& eigenvalues, double tol = 1e-8);

/// Degree-4 polynomial, coefficients highest degree first (c4 .. c0).
struct QuarticPoly {
  std::array<double, 5> c{};

  double operator()(double x) const noexcept;
  double derivative(double x) const noexcept;
  /// sum |c_i| |x|^i, the natural scale of an evaluation at x.
  double magnitude(double x) const noexcept;
  double coefficient_norm() const noexcept;
};

struct QuarticRoot {
  double value;
  int multiplicity;
};

/// r_{a1,a2}(x) whose zeros at x = t11 / t21 make every Cov-Cov4 eigenvalue of
/// the aligned three-group Gaussian mixture equal to one.
QuarticPoly quartic_r(double alpha1, double alpha2);

/// Real roots, ascending, each listed once with its multiplicity. Throws
/// DegeneratePolynomial when every coefficient is zero.
std::vector<QuarticRoot> quartic_real_roots_detailed(const QuarticPoly& poly);
std::vector<double> quartic_real_roots(const QuarticPoly& poly);

/// Real roots of r_{a1,a2} that are admissible ratios t11 / t21 (excludes 0 and 1).
std::vector<double> prop2_admissible_ratios(double alpha1, double alpha2);

/// Aligned three-group model: alpha1 N(t11 e1, I) + alpha2 N(t21 e1, I) + alpha3 N(0, I).
MixtureSpec aligned_three_group(double alpha1, double alpha2, double t11, double t21, std::size_t p);

/// |r(t11/t21)| <= 1e-9 (relative to the evaluation scale). Throws InvalidCenters
/// when t11 = 0, t21 = 0 or t11 = t21.
bool prop2_all_eigen_one(double alpha1, double alpha2, double t11, double t21, std::size_t p);

}  // namespace ics::theory
