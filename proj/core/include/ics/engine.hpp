#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ics/matlin.hpp"
#include "ics/random.hpp"
#include "ics/scatter.hpp"

namespace ics {

/// Ordered pair (V1, V2). ICS diagonalizes V1^{-1} V2 with H^T V1 H = I.
struct ScatterPair {
  ScatterKind v1;
  ScatterKind v2;

  /// "<v1>-<v2>", e.g. "cov-cov4", "tcov-cov", "mcd25-cov".
  static ScatterPair parse(const std::string& spec);
  std::string name() const;

  friend bool operator==(const ScatterPair&, const ScatterPair&) = default;
};

struct IcsResult {
  std::vector<double> eigenvalues;  // descending
  Matrix h;                         // columns h_1..h_p
  ScatterPair pair;
  std::vector<double> center;       // location of the V1 estimator
};

struct IcsOptions {
  McdOptions mcd;
};

/// Fits both scatters and diagonalizes them. `rng` only feeds MCD starts.
IcsResult ics_fit(const DataMatrix& x, const ScatterPair& pair, CounterRng& rng,
                  const IcsOptions& options = {});
IcsResult ics_fit(const DataMatrix& x, const ScatterPair& pair);

/// Invariant coordinates z_i = H^T (x_i - center).
DataMatrix transform(const DataMatrix& x, const IcsResult& result);

struct Selection {
  std::vector<std::size_t> indices;  // 1-based, ascending
  std::size_t d = 0;
  bool degenerate = false;           // all eigenvalues (numerically) equal the median
  std::string warning;
};

/// Median of the eigenvalues (midpoint average for an even count).
double median_of(std::vector<double> values);

/// med criterion: the d components whose eigenvalues deviate most from the
/// median. Ties prefer the larger eigenvalue, then the smaller index.
Selection select_med(const std::vector<double>& eigenvalues, std::size_t d);

}  // namespace ics
