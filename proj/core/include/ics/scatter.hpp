#pragma once

// Sample location/scatter estimators used as inputs to invariant coordinate
// selection. All of them are affine equivariant: for y_i = A x_i + b the
// scatter becomes A V A^T (the raw MCD only when its subset search is exact).

#include <cstddef>
#include <string>
#include <vector>

#include "ics/matlin.hpp"
#include "ics/random.hpp"

namespace ics {

/// n x p data, one observation per row.
using DataMatrix = Matrix;

/// Throws InvalidArgument for non-finite values or an empty matrix.
void validate_data(const DataMatrix& x);

class ScatterKind {
 public:
  enum class Type { Cov, Cov4, CovAxis, Tcov, Mcd };

  static ScatterKind cov() { return ScatterKind(Type::Cov, 0.0); }
  static ScatterKind cov4() { return ScatterKind(Type::Cov4, 0.0); }
  static ScatterKind cov_axis() { return ScatterKind(Type::CovAxis, 0.0); }
  static ScatterKind tcov(double beta = 2.0);
  static ScatterKind mcd(double tau);

  /// Parses cov, cov4, covaxis, tcov, mcd25, mcd50, mcd75 (case-insensitive).
  static ScatterKind parse(const std::string& name);

  Type type() const noexcept { return type_; }
  double beta() const noexcept { return param_; }
  double tau() const noexcept { return param_; }
  std::string name() const;

  friend bool operator==(const ScatterKind&, const ScatterKind&) = default;

 private:
  ScatterKind(Type type, double param) : type_(type), param_(param) {}
  Type type_;
  double param_;
};

struct LocationScatter {
  std::vector<double> location;
  SpdMatrix scatter;
  ScatterKind kind;
};

/// Column means and covariance with divisor n.
LocationScatter mean_cov(const DataMatrix& x);

/// Fourth-moment scatter: (1/(n(p+2))) sum d_i^2 (x_i - mean)(x_i - mean)^T with
/// d_i^2 the squared Mahalanobis distance under mean_cov.
LocationScatter cov4(const DataMatrix& x);

/// One-step M-estimator with weights 1/d_i^2: (p/n) sum (x_i - mean)(x_i - mean)^T / d_i^2.
LocationScatter cov_axis(const DataMatrix& x);

/// Pairwise one-step M-estimator:
///   sum_{i<j} w_ij y_ij y_ij^T / (2 sum_{i<j} w_ij),  y_ij = x_i - x_j,
///   w_ij = exp(-beta d_ij^2 / 2), d_ij^2 = y_ij^T COV^{-1} y_ij.
LocationScatter tcov(const DataMatrix& x, double beta = 2.0);

struct McdOptions {
  std::size_t starts = 500;            // elemental (p+1)-point starts
  std::size_t initial_csteps = 2;      // C-steps applied to every start
  std::size_t refine_best = 10;        // candidates iterated to convergence
  std::size_t exhaustive_limit = 200000;  // enumerate all subsets up to this many
  std::size_t max_csteps = 100;
};

struct McdResult {
  LocationScatter estimate;
  std::vector<std::size_t> subset;            // sorted row indices
  std::vector<double> determinant_trace;      // winner's C-step determinants
  bool exhaustive = false;
};

/// Subset size used by the raw MCD: ceil(tau * n).
std::size_t mcd_subset_size(std::size_t n, double tau);

/// Raw minimum covariance determinant (mean and divisor-h covariance of the
/// h-subset, no reweighting or consistency factor).
McdResult mcd_raw_detailed(const DataMatrix& x, double tau, CounterRng& rng,
                           const McdOptions& options = {});
LocationScatter mcd_raw(const DataMatrix& x, double tau, CounterRng& rng,
                        const McdOptions& options = {});

/// One C-step: returns the h rows with smallest Mahalanobis distance to the
/// mean/covariance of `subset`.
std::vector<std::size_t> mcd_cstep(const DataMatrix& x, const std::vector<std::size_t>& subset,
                                   std::size_t h);

/// Dispatches on kind. `rng` is only consumed by the MCD.
LocationScatter estimate_scatter(const DataMatrix& x, const ScatterKind& kind, CounterRng& rng,
                                 const McdOptions& mcd_options = {});

/// Applies y_i = A x_i + b to every row.
DataMatrix affine_map(const DataMatrix& x, const Matrix& a, std::span<const double> b);

}  // namespace ics
