#pragma once

// Grid searches for the group proportion at which a Cov-Cov4 eigenvalue of a
// Dirac mixture with q = k - 1 reaches the reference value 1.
//
//   setup 1: alpha1 decreases from 1/k, all other groups but the last at 1/k
//   setup 2: as setup 1 with alpha2 fixed at (setup-1 threshold + 20 steps)
//   setup 3: as setup 1 with alpha2 fixed at 0.05; two eigenvalues must reach 1
//
// The last group always takes the remainder.

#include <cstddef>
#include <optional>
#include <vector>

#include "ics/matlin.hpp"

namespace ics::thresholds {

struct ThresholdSetup {
  int id = 1;
  std::size_t k = 2;
  double step = 0.001;
};

struct ThresholdResult {
  std::size_t k = 0;
  int setup = 0;
  double threshold = 0.0;
  std::size_t crossing_index = 0;        // 1-based index of the eigenvalue that crosses
  std::vector<double> proportions;       // grid row at the threshold
  std::vector<double> eigenvalues;       // spectrum at the threshold
};

struct ThresholdOptions {
  std::optional<Matrix> centers;         // (k-1) x k, full rank; defaults to default_centers(k)
  std::optional<double> setup1_threshold;  // reused by setup 2 when given
};

/// A reached eigenvalue is one with rho >= 1 - kReachTolerance.
inline constexpr double kReachTolerance = 1e-9;

/// Throws InvalidSetup for an unknown id, k < 2 (k < 3 for setups 2 and 3) or a
/// step that does not divide 1.
void validate(const ThresholdSetup& setup);

/// Unit vectors e_1 .. e_{k-1} followed by the origin.
Matrix default_centers(std::size_t k);

/// Number of eigenvalues that must reach 1 (1 for setups 1 and 2, 2 for setup 3).
std::size_t required_crossings(int setup_id);

/// Fixed alpha2 of setups 2 and 3 (setup 2 needs the setup-1 threshold).
double fixed_alpha2(const ThresholdSetup& setup, std::optional<double> setup1_threshold);

/// Rows in scan order (decreasing alpha1).
std::vector<std::vector<double>> build_grid(const ThresholdSetup& setup,
                                            std::optional<double> setup1_threshold = {});

/// Throws NoCrossing when the criterion is never met and NonMonotoneCrossing
/// when it fails again further down the grid.
ThresholdResult find_threshold(const ThresholdSetup& setup, const ThresholdOptions& options = {});

/// Runs the requested setups for every k in [k_min, k_max]; setups that need
/// three groups are skipped for k = 2. Setup-1 thresholds are cached for setup 2.
std::vector<ThresholdResult> threshold_table(std::size_t k_min, std::size_t k_max,
                                             const std::vector<int>& setups, double step = 0.001);

/// All three setups for k in [k_min, k_max] at step 0.001.
std::vector<ThresholdResult> reproduce_table1(std::size_t k_min = 2, std::size_t k_max = 10);

}  // namespace ics::thresholds
