#include "ics/mixture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ics/error.hpp"

namespace ics::theory {

namespace {

void check_distinct(const Matrix& centers) {
  const double scale = std::max(1.0, centers.max_abs());
  for (std::size_t a = 0; a < centers.cols(); ++a) {
    for (std::size_t b = a + 1; b < centers.cols(); ++b) {
      double diff = 0.0;
      for (std::size_t r = 0; r < centers.rows(); ++r)
        diff = std::max(diff, std::abs(centers(r, a) - centers(r, b)));
      if (diff <= 1e-12 * scale)
        throw Error(Errc::InvalidSpec, "centers " + std::to_string(a + 1) + " and " +
                                           std::to_string(b + 1) + " coincide");
    }
  }
}

// sum_l alpha_l tc_l tc_l^T restricted to the first `dim` rows.
Matrix between_scatter(const Matrix& tc, const std::vector<double>& alpha, std::size_t dim) {
  Matrix s(dim, dim);
  for (std::size_t l = 0; l < alpha.size(); ++l)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) s(i, j) += alpha[l] * tc(i, l) * tc(j, l);
  return s;
}

// E[x_a x_b x_c x_d] for the centered Gaussian mixture, any index may repeat.
double cross_moment4(const Matrix& tc, const std::vector<double>& alpha,
                     const std::array<std::size_t, 4>& idx) {
  std::array<std::size_t, 4> coord{};
  std::array<int, 4> mult{};
  std::size_t distinct = 0;
  for (std::size_t v : idx) {
    std::size_t slot = 0;
    while (slot < distinct && coord[slot] != v) ++slot;
    if (slot == distinct) {
      coord[distinct] = v;
      mult[distinct] = 0;
      ++distinct;
    }
    ++mult[slot];
  }
  double total = 0.0;
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    double prod = alpha[l];
    for (std::size_t s = 0; s < distinct; ++s) prod *= gauss_moment(mult[s], tc(coord[s], l), 1.0);
    total += prod;
  }
  return total;
}

SpdMatrix to_spd_singular(const Matrix& m, const char* what) {
  try {
    return SpdMatrix(m);
  } catch (const Error& e) {
    if (e.code() == Errc::NotPositiveDefinite) throw Error(Errc::Singular, what);
    throw;
  }
}

}  // namespace

std::vector<double> validate_proportions(std::vector<double> proportions) {
  if (proportions.size() < 2) throw Error(Errc::InvalidSpec, "need at least two groups");
  double sum = 0.0;
  for (double a : proportions) {
    if (!std::isfinite(a) || a <= 0.0)
      throw Error(Errc::InvalidSpec, "proportions must be positive");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(Errc::InvalidSpec, "proportions sum to " + std::to_string(sum) + ", not 1");
  for (double& a : proportions) a /= sum;
  return proportions;
}

MixtureSpec::MixtureSpec(Family family, std::vector<double> proportions, Matrix centers,
                         std::size_t q)
    : family_(family), proportions_(std::move(proportions)), centers_(std::move(centers)), q_(q) {}

MixtureSpec MixtureSpec::gaussian(std::vector<double> proportions, Matrix centers, std::size_t q) {
  proportions = validate_proportions(std::move(proportions));
  if (centers.cols() != proportions.size())
    throw Error(Errc::InvalidSpec, "centers must have one column per group");
  if (!centers.all_finite()) throw Error(Errc::InvalidSpec, "centers must be finite");
  const std::size_t p = centers.rows();
  if (q < 1 || q > p || q + 1 > proportions.size())
    throw Error(Errc::InvalidSpec, "need 1 <= q <= min(p, k - 1)");
  check_distinct(centers);

  MixtureSpec spec(Family::GaussianUnitWithin, std::move(proportions), std::move(centers), q);
  const Matrix tc = spec.centered_centers();
  const double scale = std::max(1.0, tc.max_abs());
  for (std::size_t r = q; r < p; ++r)
    for (std::size_t l = 0; l < tc.cols(); ++l)
      if (std::abs(tc(r, l)) > 1e-12 * scale)
        throw Error(Errc::InvalidSpec, "centered centers must vanish beyond the first q coordinates");
  try {
    SpdMatrix check(between_scatter(tc, spec.proportions_, q));
  } catch (const Error&) {
    throw Error(Errc::InvalidSpec, "centers do not span q dimensions");
  }
  return spec;
}

MixtureSpec MixtureSpec::dirac(std::vector<double> proportions, Matrix centers) {
  proportions = validate_proportions(std::move(proportions));
  if (centers.cols() != proportions.size())
    throw Error(Errc::InvalidSpec, "centers must have one column per group");
  if (!centers.all_finite()) throw Error(Errc::InvalidSpec, "centers must be finite");
  check_distinct(centers);
  const std::size_t q = centers.rows();
  return MixtureSpec(Family::Dirac, std::move(proportions), std::move(centers), q);
}

Matrix MixtureSpec::centered_centers() const {
  Matrix tc = centers_;
  for (std::size_t r = 0; r < tc.rows(); ++r) {
    double mean = 0.0;
    for (std::size_t l = 0; l < tc.cols(); ++l) mean += proportions_[l] * centers_(r, l);
    for (std::size_t l = 0; l < tc.cols(); ++l) tc(r, l) -= mean;
  }
  return tc;
}

double gauss_moment(int order, double mu, double sigma) {
  const double s2 = sigma * sigma;
  switch (order) {
    case 0: return 1.0;
    case 1: return mu;
    case 2: return mu * mu + s2;
    case 3: return mu * mu * mu + 3.0 * mu * s2;
    case 4: return mu * mu * mu * mu + 6.0 * mu * mu * s2 + 3.0 * s2 * s2;
    default: throw Error(Errc::InvalidArgument, "moment order must be 0..4");
  }
}

SpdMatrix gauss_pop_cov(const MixtureSpec& spec) {
  if (spec.family() != Family::GaussianUnitWithin)
    throw Error(Errc::InvalidSpec, "expected a Gaussian mixture");
  const std::size_t p = spec.p();
  Matrix cov = between_scatter(spec.centered_centers(), spec.proportions(), p);
  for (std::size_t i = 0; i < p; ++i) cov(i, i) += 1.0;
  return SpdMatrix(cov);
}

SpdMatrix gauss_pop_cov4(const MixtureSpec& spec) {
  if (spec.family() != Family::GaussianUnitWithin)
    throw Error(Errc::InvalidSpec, "expected a Gaussian mixture");
  const std::size_t p = spec.p();
  const std::size_t q = spec.q();
  const Matrix tc = spec.centered_centers();
  const auto& alpha = spec.proportions();

  Matrix beta = between_scatter(tc, alpha, q);
  for (std::size_t i = 0; i < q; ++i) beta(i, i) += 1.0;
  const SpdMatrix b = spd_inverse(SpdMatrix(beta));

  Matrix cov4 = Matrix::identity(p);
  const double noise = static_cast<double>(p - q);
  for (std::size_t m = 0; m < q; ++m) {
    for (std::size_t s = m; s < q; ++s) {
      double acc = noise * beta(m, s);
      for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j)
          acc += b(i, j) * cross_moment4(tc, alpha, {m, s, i, j});
      cov4(m, s) = cov4(s, m) = acc / static_cast<double>(p + 2);
    }
  }
  return SpdMatrix(cov4);
}

std::vector<double> gauss_pop_ics(const MixtureSpec& spec) {
  return gen_eig(gauss_pop_cov(spec), gauss_pop_cov4(spec)).values;
}

SpdMatrix dirac_pop_cov(const MixtureSpec& spec) {
  if (spec.family() != Family::Dirac) throw Error(Errc::InvalidSpec, "expected a Dirac mixture");
  return to_spd_singular(between_scatter(spec.centered_centers(), spec.proportions(), spec.q()),
                         "centers do not span q dimensions");
}

SpdMatrix dirac_pop_cov4(const MixtureSpec& spec) {
  const SpdMatrix cov = dirac_pop_cov(spec);
  const Matrix tc = spec.centered_centers();
  const auto& alpha = spec.proportions();
  const std::size_t q = spec.q();
  Matrix cov4(q, q);
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    const std::vector<double> t = tc.col(l);
    const double w = alpha[l] * cov.inverse_quadratic_form(t);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j) cov4(i, j) += w * t[i] * t[j];
  }
  cov4 *= 1.0 / static_cast<double>(q + 2);
  return to_spd_singular(cov4, "COV4 of the Dirac mixture is singular");
}

std::vector<double> dirac_pop_ics(const MixtureSpec& spec) {
  return gen_eig(dirac_pop_cov(spec), dirac_pop_cov4(spec)).values;
}

double dirac_two_group_rho(double alpha1) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw Error(Errc::InvalidArgument, "alpha1 must lie in (0, 1)");
  const double a = alpha1;
  const double b = 1.0 - alpha1;
  return (a * a * a + b * b * b) / (3.0 * a * b);
}

double gaussian_separation_limit(double dirac_rho, std::size_t p, std::size_t q) {
  if (q > p) throw Error(Errc::InvalidArgument, "q must not exceed p");
  return (static_cast<double>(q + 2) * dirac_rho + static_cast<double>(p - q)) /
         static_cast<double>(p + 2);
}

bool all_equal_one(const std::vector<double>& eigenvalues, double tol) {
  return std::all_of(eigenvalues.begin(), eigenvalues.end(),
                     [tol](double v) { return std::abs(v - 1.0) <= tol; });
}

MixtureSpec aligned_three_group(double alpha1, double alpha2, double t11, double t21,
                                std::size_t p) {
  if (!(alpha1 > 0.0 && alpha2 > 0.0 && alpha1 + alpha2 < 1.0))
    throw Error(Errc::InvalidArgument, "need alpha1, alpha2 > 0 and alpha1 + alpha2 < 1");
  if (p < 1) throw Error(Errc::InvalidArgument, "p must be positive");
  Matrix centers(p, 3);
  centers(0, 0) = t11;
  centers(0, 1) = t21;
  return MixtureSpec::gaussian({alpha1, alpha2, 1.0 - alpha1 - alpha2}, std::move(centers), 1);
}

}  // namespace ics::theory
