#include "ics/scatter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "ics/error.hpp"

namespace ics {

namespace {

std::vector<double> column_means(const DataMatrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += r[j];
  }
  for (double& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

SpdMatrix to_spd_or_singular(const Matrix& m, const char* what) {
  try {
    return SpdMatrix(m);
  } catch (const Error& e) {
    if (e.code() != Errc::NotPositiveDefinite) throw;
    throw Error(Errc::Singular, std::string(what) + " is not positive definite (" + e.what() + ")");
  }
}

// Adds w * y y^T into the upper triangle of acc.
void add_outer_upper(Matrix& acc, std::span<const double> y, double w) {
  const std::size_t p = y.size();
  for (std::size_t a = 0; a < p; ++a) {
    const double wa = w * y[a];
    if (wa == 0.0) continue;
    auto row = acc.row(a);
    for (std::size_t b = a; b < p; ++b) row[b] += wa * y[b];
  }
}

Matrix mirror_upper(Matrix acc, double scale) {
  for (std::size_t a = 0; a < acc.rows(); ++a) {
    for (std::size_t b = a; b < acc.cols(); ++b) {
      acc(a, b) *= scale;
      acc(b, a) = acc(a, b);
    }
  }
  return acc;
}

struct SubsetMoments {
  std::vector<double> mean;
  Matrix cov;
};

SubsetMoments subset_moments(const DataMatrix& x, std::span<const std::size_t> subset) {
  const std::size_t p = x.cols();
  SubsetMoments m{std::vector<double>(p, 0.0), Matrix(p, p)};
  for (std::size_t i : subset) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < p; ++j) m.mean[j] += r[j];
  }
  const double h = static_cast<double>(subset.size());
  for (double& v : m.mean) v /= h;
  std::vector<double> y(p);
  for (std::size_t i : subset) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < p; ++j) y[j] = r[j] - m.mean[j];
    add_outer_upper(m.cov, y, 1.0);
  }
  m.cov = mirror_upper(std::move(m.cov), 1.0 / h);
  return m;
}

std::optional<SpdMatrix> try_spd(const Matrix& m) {
  try {
    return SpdMatrix(m);
  } catch (const Error& e) {
    if (e.code() != Errc::NotPositiveDefinite) throw;
    return std::nullopt;
  }
}

std::vector<double> mahalanobis_all(const DataMatrix& x, const std::vector<double>& mean,
                                    const SpdMatrix& s) {
  std::vector<double> d(x.rows());
  std::vector<double> y(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) y[j] = r[j] - mean[j];
    d[i] = s.inverse_quadratic_form(y);
  }
  return d;
}

std::vector<std::size_t> smallest_h(const std::vector<double>& d, std::size_t h) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h - 1), idx.end(), less);
  idx.resize(h);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double binomial_or_inf(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  double b = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (b > 1e18) return std::numeric_limits<double>::infinity();
  }
  return std::round(b);
}

LocationScatter make_estimate(std::vector<double> location, SpdMatrix scatter, ScatterKind kind) {
  return LocationScatter{std::move(location), std::move(scatter), kind};
}

}  // namespace

void validate_data(const DataMatrix& x) {
  if (x.empty()) throw Error(Errc::InvalidArgument, "data matrix is empty");
  if (!x.all_finite()) throw Error(Errc::InvalidArgument, "data matrix has non-finite values");
}

ScatterKind ScatterKind::tcov(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(Errc::InvalidArgument, "tcov beta must be positive");
  }
  return ScatterKind(Type::Tcov, beta);
}

ScatterKind ScatterKind::mcd(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(Errc::InvalidArgument, "mcd tau must be in (0, 1]");
  return ScatterKind(Type::Mcd, tau);
}

ScatterKind ScatterKind::parse(const std::string& raw) {
  std::string name;
  for (char c : raw) name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (name == "cov") return cov();
  if (name == "cov4") return cov4();
  if (name == "covaxis") return cov_axis();
  if (name == "tcov") return tcov();
  if (name == "mcd25") return mcd(0.25);
  if (name == "mcd50") return mcd(0.5);
  if (name == "mcd75") return mcd(0.75);
  throw Error(Errc::InvalidArgument, "unknown scatter '" + raw +
                                         "' (expected cov, cov4, covaxis, tcov, mcd25, mcd50, mcd75)");
}

std::string ScatterKind::name() const {
  switch (type_) {
    case Type::Cov: return "cov";
    case Type::Cov4: return "cov4";
    case Type::CovAxis: return "covaxis";
    case Type::Tcov: {
      if (param_ == 2.0) return "tcov";
      std::ostringstream os;
      os << "tcov(" << param_ << ")";
      return os.str();
    }
    case Type::Mcd: {
      const double pct = param_ * 100.0;
      if (std::abs(pct - std::round(pct)) < 1e-9) {
        return "mcd" + std::to_string(static_cast<int>(std::round(pct)));
      }
      std::ostringstream os;
      os << "mcd(" << param_ << ")";
      return os.str();
    }
  }
  return "unknown";
}

LocationScatter mean_cov(const DataMatrix& x) {
  validate_data(x);
  if (x.rows() < 2) throw Error(Errc::Singular, "covariance needs at least two observations");
  const std::size_t p = x.cols();
  std::vector<double> mean = column_means(x);
  Matrix acc(p, p);
  std::vector<double> y(p);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < p; ++j) y[j] = r[j] - mean[j];
    add_outer_upper(acc, y, 1.0);
  }
  const Matrix cov = mirror_upper(std::move(acc), 1.0 / static_cast<double>(x.rows()));
  return make_estimate(std::move(mean), to_spd_or_singular(cov, "covariance"), ScatterKind::cov());
}

LocationScatter cov4(const DataMatrix& x) {
  const LocationScatter base = mean_cov(x);
  const std::size_t p = x.cols();
  Matrix acc(p, p);
  std::vector<double> y(p);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < p; ++j) y[j] = r[j] - base.location[j];
    add_outer_upper(acc, y, base.scatter.inverse_quadratic_form(y));
  }
  const double scale = 1.0 / (static_cast<double>(x.rows()) * static_cast<double>(p + 2));
  return make_estimate(base.location, to_spd_or_singular(mirror_upper(std::move(acc), scale), "cov4"),
                       ScatterKind::cov4());
}

LocationScatter cov_axis(const DataMatrix& x) {
  const LocationScatter base = mean_cov(x);
  const std::size_t p = x.cols();
  Matrix acc(p, p);
  std::vector<double> y(p);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < p; ++j) y[j] = r[j] - base.location[j];
    const double d2 = base.scatter.inverse_quadratic_form(y);
    if (d2 < 1e-12) {
      throw Error(Errc::ZeroDistance,
                  "observation " + std::to_string(i) + " coincides with the mean");
    }
    add_outer_upper(acc, y, 1.0 / d2);
  }
  const double scale = static_cast<double>(p) / static_cast<double>(x.rows());
  return make_estimate(base.location,
                       to_spd_or_singular(mirror_upper(std::move(acc), scale), "covaxis"),
                       ScatterKind::cov_axis());
}

LocationScatter tcov(const DataMatrix& x, double beta) {
  const ScatterKind kind = ScatterKind::tcov(beta);
  const LocationScatter base = mean_cov(x);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n < 3) throw Error(Errc::InvalidArgument, "tcov needs at least three observations");

  // Whitened rows z_i = L^{-1}(x_i - mean) turn pairwise Mahalanobis distances
  // into Euclidean ones.
  const Matrix& l = base.scatter.cholesky_factor();
  Matrix z(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    auto zi = z.row(i);
    for (std::size_t a = 0; a < p; ++a) {
      double s = r[a] - base.location[a];
      for (std::size_t b = 0; b < a; ++b) s -= l(a, b) * zi[b];
      zi[a] = s / l(a, a);
    }
  }
  auto pair_d2 = [&](std::size_t i, std::size_t j) {
    auto zi = z.row(i);
    auto zj = z.row(j);
    double s = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      const double d = zi[a] - zj[a];
      s += d * d;
    }
    return s;
  };

  // Weights are shifted by the smallest distance; the ratio sum w yy^T / sum w
  // is unchanged and underflow is avoided in high dimension.
  double min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) min_d2 = std::min(min_d2, pair_d2(i, j));
  }

  Matrix acc(p, p);
  double weight_sum = 0.0;
  std::vector<double> y(p);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = std::exp(-0.5 * beta * (pair_d2(i, j) - min_d2));
      if (w == 0.0) continue;
      auto xj = x.row(j);
      for (std::size_t a = 0; a < p; ++a) y[a] = xi[a] - xj[a];
      add_outer_upper(acc, y, w);
      weight_sum += w;
    }
  }
  const Matrix scatter = mirror_upper(std::move(acc), 1.0 / (2.0 * weight_sum));
  return make_estimate(base.location, to_spd_or_singular(scatter, "tcov"), kind);
}

std::size_t mcd_subset_size(std::size_t n, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(Errc::InvalidArgument, "mcd tau must be in (0, 1]");
  const double raw = tau * static_cast<double>(n);
  // Guard against tau * n landing a hair above an integer.
  const double h = std::ceil(raw - 1e-9 * std::max(1.0, raw));
  return std::min<std::size_t>(n, static_cast<std::size_t>(h));
}

std::vector<std::size_t> mcd_cstep(const DataMatrix& x, const std::vector<std::size_t>& subset,
                                   std::size_t h) {
  const SubsetMoments m = subset_moments(x, subset);
  const auto s = try_spd(m.cov);
  if (!s) throw Error(Errc::Singular, "C-step subset covariance is singular");
  return smallest_h(mahalanobis_all(x, m.mean, *s), h);
}

McdResult mcd_raw_detailed(const DataMatrix& x, double tau, CounterRng& rng,
                           const McdOptions& options) {
  validate_data(x);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const ScatterKind kind = ScatterKind::mcd(tau);
  const std::size_t h = mcd_subset_size(n, tau);
  if (h <= p) {
    throw Error(Errc::SubsetTooSmall,
                "subset size " + std::to_string(h) + " must exceed dimension " + std::to_string(p));
  }

  auto finish = [&](std::vector<std::size_t> subset, std::vector<double> trace, bool exhaustive) {
    SubsetMoments m = subset_moments(x, subset);
    McdResult r{make_estimate(std::move(m.mean), to_spd_or_singular(m.cov, "mcd"), kind),
                std::move(subset), std::move(trace), exhaustive};
    return r;
  };

  if (h == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double det = to_spd_or_singular(subset_moments(x, all).cov, "mcd").determinant();
    return finish(std::move(all), {det}, true);
  }

  if (binomial_or_inf(n, h) <= static_cast<double>(options.exhaustive_limit)) {
    std::vector<std::size_t> comb(h);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    std::vector<std::size_t> best;
    double best_log_det = std::numeric_limits<double>::infinity();
    for (;;) {
      if (const auto s = try_spd(subset_moments(x, comb).cov)) {
        const double ld = s->log_determinant();
        if (ld < best_log_det) {
          best_log_det = ld;
          best = comb;
        }
      }
      // next combination in lexicographic order
      std::size_t i = h;
      while (i > 0 && comb[i - 1] == n - h + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < h; ++j) comb[j] = comb[j - 1] + 1;
    }
    if (best.empty()) throw Error(Errc::Singular, "every h-subset has a singular covariance");
    return finish(std::move(best), {std::exp(best_log_det)}, true);
  }

  // FAST-MCD: elemental starts, a few C-steps each, then full iteration of the
  // best candidates.
  struct Candidate {
    std::vector<std::size_t> subset;
    std::vector<double> trace;
    std::size_t start;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(options.starts);

  auto cov_det = [&](const std::vector<std::size_t>& subset) -> std::optional<double> {
    const auto s = try_spd(subset_moments(x, subset).cov);
    if (!s) return std::nullopt;
    return s->determinant();
  };

  std::vector<std::size_t> perm(n);
  for (std::size_t start = 0; start < options.starts; ++start) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::size_t taken = 0;
    auto draw = [&] {
      const std::size_t k = taken + static_cast<std::size_t>(rng.below(n - taken));
      std::swap(perm[taken], perm[k]);
      ++taken;
    };
    for (std::size_t i = 0; i <= p; ++i) draw();
    std::optional<SpdMatrix> s;
    SubsetMoments m;
    for (;;) {
      m = subset_moments(x, std::span<const std::size_t>(perm.data(), taken));
      s = try_spd(m.cov);
      if (s || taken == n) break;
      draw();
    }
    if (!s) continue;
    std::vector<std::size_t> subset = smallest_h(mahalanobis_all(x, m.mean, *s), h);
    auto det = cov_det(subset);
    if (!det) continue;
    std::vector<double> trace{*det};
    for (std::size_t step = 0; det && step < options.initial_csteps; ++step) {
      auto next = mcd_cstep(x, subset, h);
      if (next == subset) break;
      subset = std::move(next);
      det = cov_det(subset);
      if (det) trace.push_back(*det);
    }
    if (!det) continue;
    candidates.push_back({std::move(subset), std::move(trace), start});
  }
  if (candidates.empty()) throw Error(Errc::Singular, "no elemental start gave a regular subset");

  auto by_det = [](const Candidate& a, const Candidate& b) {
    return a.trace.back() < b.trace.back() || (a.trace.back() == b.trace.back() && a.start < b.start);
  };
  const std::size_t keep = std::min(options.refine_best, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), by_det);
  candidates.resize(keep);

  for (Candidate& c : candidates) {
    for (std::size_t step = 0; step < options.max_csteps; ++step) {
      auto next = mcd_cstep(x, c.subset, h);
      if (next == c.subset) break;
      const auto det = cov_det(next);
      if (!det) throw Error(Errc::Singular, "C-step reached an exact-fit subset");
      c.subset = std::move(next);
      c.trace.push_back(*det);
    }
  }
  const Candidate& best = *std::min_element(candidates.begin(), candidates.end(), by_det);
  return finish(best.subset, best.trace, false);
}

LocationScatter mcd_raw(const DataMatrix& x, double tau, CounterRng& rng,
                        const McdOptions& options) {
  return mcd_raw_detailed(x, tau, rng, options).estimate;
}

LocationScatter estimate_scatter(const DataMatrix& x, const ScatterKind& kind, CounterRng& rng,
                                 const McdOptions& mcd_options) {
  switch (kind.type()) {
    case ScatterKind::Type::Cov: return mean_cov(x);
    case ScatterKind::Type::Cov4: return cov4(x);
    case ScatterKind::Type::CovAxis: return cov_axis(x);
    case ScatterKind::Type::Tcov: return tcov(x, kind.beta());
    case ScatterKind::Type::Mcd: return mcd_raw(x, kind.tau(), rng, mcd_options);
  }
  throw Error(Errc::InvalidArgument, "unhandled scatter kind");
}

DataMatrix affine_map(const DataMatrix& x, const Matrix& a, std::span<const double> b) {
  if (a.cols() != x.cols() || b.size() != a.rows()) {
    throw Error(Errc::DimensionMismatch, "affine_map: shapes do not agree");
  }
  DataMatrix y(x.rows(), a.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::vector<double> yi = a * x.row(i);
    for (std::size_t j = 0; j < a.rows(); ++j) y(i, j) = yi[j] + b[j];
  }
  return y;
}

}  // namespace ics
