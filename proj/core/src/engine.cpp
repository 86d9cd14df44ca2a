#include "ics/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ics/error.hpp"

namespace ics {

ScatterPair ScatterPair::parse(const std::string& spec) {
  const auto dash = spec.find('-');
  if (dash == std::string::npos || spec.find('-', dash + 1) != std::string::npos) {
    throw Error(Errc::InvalidArgument, "pair must look like <v1>-<v2>, got '" + spec + "'");
  }
  ScatterPair pair{ScatterKind::parse(spec.substr(0, dash)), ScatterKind::parse(spec.substr(dash + 1))};
  if (pair.v1 == pair.v2) throw Error(Errc::InvalidArgument, "pair uses the same scatter twice");
  return pair;
}

std::string ScatterPair::name() const { return v1.name() + "-" + v2.name(); }

IcsResult ics_fit(const DataMatrix& x, const ScatterPair& pair, CounterRng& rng,
                  const IcsOptions& options) {
  LocationScatter first = estimate_scatter(x, pair.v1, rng, options.mcd);
  const LocationScatter second = estimate_scatter(x, pair.v2, rng, options.mcd);
  GenEig eig = gen_eig(first.scatter, second.scatter);
  return IcsResult{std::move(eig.values), std::move(eig.h), pair, std::move(first.location)};
}

IcsResult ics_fit(const DataMatrix& x, const ScatterPair& pair) {
  CounterRng rng(0, 0);
  return ics_fit(x, pair, rng);
}

DataMatrix transform(const DataMatrix& x, const IcsResult& result) {
  const std::size_t p = result.h.rows();
  if (x.cols() != p || result.center.size() != p) {
    throw Error(Errc::DimensionMismatch, "transform: data has " + std::to_string(x.cols()) +
                                             " columns, ICS basis has " + std::to_string(p));
  }
  DataMatrix z(x.rows(), result.h.cols());
  std::vector<double> y(p);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < p; ++j) y[j] = r[j] - result.center[j];
    auto zi = z.row(i);
    for (std::size_t c = 0; c < result.h.cols(); ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += result.h(j, c) * y[j];
      zi[c] = s;
    }
  }
  return z;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Selection select_med(const std::vector<double>& eigenvalues, std::size_t d) {
  const std::size_t p = eigenvalues.size();
  if (d < 1 || d >= p) {
    throw Error(Errc::BadCount, "select_med needs 1 <= d < p (d = " + std::to_string(d) +
                                    ", p = " + std::to_string(p) + ")");
  }
  const double med = median_of(eigenvalues);
  std::vector<double> dev(p);
  double scale = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    dev[i] = std::abs(eigenvalues[i] - med);
    scale = std::max(scale, std::abs(eigenvalues[i]));
  }
  // Deviations closer than this are ties.
  const double tie = 1e-12 * std::max(scale, 1e-300);

  // Greedy picks keep the tie rule well defined (a tolerance-based comparator is
  // not a strict weak order, so no std::sort here).
  auto better = [&](std::size_t a, std::size_t b) {
    if (std::abs(dev[a] - dev[b]) > tie) return dev[a] > dev[b];
    if (eigenvalues[a] != eigenvalues[b]) return eigenvalues[a] > eigenvalues[b];
    return a < b;
  };
  std::vector<bool> taken(p, false);
  std::vector<std::size_t> order;
  for (std::size_t pick = 0; pick < d; ++pick) {
    std::size_t best = p;
    for (std::size_t i = 0; i < p; ++i) {
      if (!taken[i] && (best == p || better(i, best))) best = i;
    }
    taken[best] = true;
    order.push_back(best);
  }

  Selection s;
  s.d = d;
  for (std::size_t i = 0; i < d; ++i) s.indices.push_back(order[i] + 1);
  std::sort(s.indices.begin(), s.indices.end());
  if (*std::max_element(dev.begin(), dev.end()) < 1e-10 * std::max(1.0, std::abs(med))) {
    s.degenerate = true;
    s.warning = "degenerate spectrum: every eigenvalue equals the median";
  }
  return s;
}

}  // namespace ics
