#include <algorithm>
#include <cmath>
#include <vector>

#include "ics/error.hpp"
#include "ics/mixture.hpp"

namespace ics::theory {

namespace {

// Coefficients highest degree first.
using Poly = std::vector<double>;

double eval(const Poly& c, double x) {
  double acc = 0.0;
  for (double v : c) acc = acc * x + v;
  return acc;
}

double magnitude_of(const Poly& c, double x) {
  double acc = 0.0;
  const double ax = std::abs(x);
  for (double v : c) acc = acc * ax + std::abs(v);
  return acc;
}

Poly derivative_of(const Poly& c) {
  Poly d;
  const std::size_t n = c.size() - 1;
  for (std::size_t i = 0; i < n; ++i) d.push_back(c[i] * static_cast<double>(n - i));
  return d;
}

Poly strip_leading(const Poly& c) {
  double norm = 0.0;
  for (double v : c) norm = std::max(norm, std::abs(v));
  std::size_t first = 0;
  while (first < c.size() && std::abs(c[first]) <= 1e-14 * norm) ++first;
  return Poly(c.begin() + static_cast<std::ptrdiff_t>(first), c.end());
}

bool vanishes(const Poly& c, double x) {
  return std::abs(eval(c, x)) <= 1e-9 * magnitude_of(c, x);
}

double bisect(const Poly& c, double a, double b, double fa) {
  for (int it = 0; it < 300; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = eval(c, m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

int multiplicity_at(const Poly& c, double x) {
  int mult = 1;
  Poly d = derivative_of(c);
  while (d.size() > 1 && vanishes(d, x)) {
    ++mult;
    d = derivative_of(d);
  }
  return mult;
}

// Roots are isolated between consecutive critical points (found recursively
// from the derivative) and refined by bisection; a critical point at which the
// polynomial vanishes is a repeated root.
std::vector<QuarticRoot> real_roots(const Poly& raw) {
  const Poly c = strip_leading(raw);
  if (c.size() <= 1) return {};
  if (c.size() == 2) return {{-c[1] / c[0], 1}};

  double bound = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) bound = std::max(bound, std::abs(c[i] / c[0]));
  bound += 1.0;

  std::vector<double> crit;
  for (const auto& r : real_roots(derivative_of(c)))
    if (std::abs(r.value) < bound) crit.push_back(r.value);

  std::vector<QuarticRoot> roots;
  for (double x : crit)
    if (vanishes(c, x)) roots.push_back({x, std::max(2, multiplicity_at(c, x))});

  std::vector<double> knots{-bound};
  knots.insert(knots.end(), crit.begin(), crit.end());
  knots.push_back(bound);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    const double fa = eval(c, a);
    const double fb = eval(c, b);
    if (fa == 0.0 || fb == 0.0 || (fa < 0.0) == (fb < 0.0)) continue;
    const double x = bisect(c, a, b, fa);
    const bool near_repeated = std::any_of(roots.begin(), roots.end(), [x](const QuarticRoot& r) {
      return r.multiplicity > 1 && std::abs(r.value - x) <= 1e-7 * (1.0 + std::abs(x));
    });
    if (!near_repeated) roots.push_back({x, 1});
  }
  // Exact zeros sitting on a knot that is not a critical point.
  for (double x : {-bound, bound})
    if (eval(c, x) == 0.0) roots.push_back({x, 1});

  std::sort(roots.begin(), roots.end(),
            [](const QuarticRoot& a, const QuarticRoot& b) { return a.value < b.value; });
  std::vector<QuarticRoot> merged;
  for (const auto& r : roots) {
    if (!merged.empty() && std::abs(merged.back().value - r.value) <= 1e-12 * (1.0 + std::abs(r.value))) {
      merged.back().multiplicity = std::max(merged.back().multiplicity, r.multiplicity);
      continue;
    }
    merged.push_back(r);
  }
  return merged;
}

}  // namespace

double QuarticPoly::operator()(double x) const noexcept {
  return (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4];
}

double QuarticPoly::derivative(double x) const noexcept {
  return ((4.0 * c[0] * x + 3.0 * c[1]) * x + 2.0 * c[2]) * x + c[3];
}

double QuarticPoly::magnitude(double x) const noexcept {
  const double ax = std::abs(x);
  return (((std::abs(c[0]) * ax + std::abs(c[1])) * ax + std::abs(c[2])) * ax + std::abs(c[3])) * ax +
         std::abs(c[4]);
}

double QuarticPoly::coefficient_norm() const noexcept {
  double s = 0.0;
  for (double v : c) s += v * v;
  return std::sqrt(s);
}

QuarticPoly quartic_r(double a1, double a2) {
  if (!(a1 > 0.0 && a2 > 0.0 && a1 + a2 < 1.0))
    throw Error(Errc::InvalidArgument, "need alpha1, alpha2 > 0 and alpha1 + alpha2 < 1");
  QuarticPoly r;
  r.c[0] = a1 * (-1.0 + 7.0 * a1 - 12.0 * a1 * a1 + 6.0 * a1 * a1 * a1);
  r.c[1] = 4.0 * a1 * a2 * (1.0 - 6.0 * a1 + 6.0 * a1 * a1);
  r.c[2] = 6.0 * a1 * a2 * (1.0 - 2.0 * a2 + a1 * (-2.0 + 6.0 * a2));
  r.c[3] = 4.0 * a1 * a2 * (1.0 - 6.0 * a2 + 6.0 * a2 * a2);
  r.c[4] = a2 * (-1.0 + 7.0 * a2 - 12.0 * a2 * a2 + 6.0 * a2 * a2 * a2);
  return r;
}

std::vector<QuarticRoot> quartic_real_roots_detailed(const QuarticPoly& poly) {
  const Poly c(poly.c.begin(), poly.c.end());
  if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; }))
    throw Error(Errc::DegeneratePolynomial, "all coefficients are zero");
  return real_roots(c);
}

std::vector<double> quartic_real_roots(const QuarticPoly& poly) {
  std::vector<double> out;
  for (const auto& r : quartic_real_roots_detailed(poly)) out.push_back(r.value);
  return out;
}

std::vector<double> prop2_admissible_ratios(double alpha1, double alpha2) {
  std::vector<double> out;
  for (double x : quartic_real_roots(quartic_r(alpha1, alpha2)))
    if (std::abs(x) > 1e-12 && std::abs(x - 1.0) > 1e-8) out.push_back(x);
  return out;
}

bool prop2_all_eigen_one(double alpha1, double alpha2, double t11, double t21, std::size_t p) {
  if (t11 == 0.0 || t21 == 0.0 || t11 == t21)
    throw Error(Errc::InvalidCenters, "need t11 != 0, t21 != 0 and t11 != t21");
  if (p < 1) throw Error(Errc::InvalidArgument, "p must be positive");
  const QuarticPoly r = quartic_r(alpha1, alpha2);
  const double x = t11 / t21;
  return std::abs(r(x)) <= 1e-9 * r.magnitude(x);
}

}  // namespace ics::theory
