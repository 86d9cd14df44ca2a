#include "ics/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ics/error.hpp"
#include "ics/mixture.hpp"

namespace ics::thresholds {

namespace {

std::size_t grid_count(double step) { return static_cast<std::size_t>(std::llround(1.0 / step)); }

std::size_t reached(const std::vector<double>& rho) {
  return static_cast<std::size_t>(std::count_if(
      rho.begin(), rho.end(), [](double v) { return v >= 1.0 - kReachTolerance; }));
}

}  // namespace

void validate(const ThresholdSetup& setup) {
  if (setup.id < 1 || setup.id > 3)
    throw Error(Errc::InvalidSetup, "setup must be 1, 2 or 3");
  if (setup.k < 2) throw Error(Errc::InvalidSetup, "need at least two groups");
  if (setup.id != 1 && setup.k < 3)
    throw Error(Errc::InvalidSetup,
                "setup " + std::to_string(setup.id) + " requires at least three groups");
  if (!(setup.step > 0.0 && setup.step < 1.0))
    throw Error(Errc::InvalidSetup, "step must lie in (0, 1)");
  const double n = std::round(1.0 / setup.step);
  if (std::abs(n * setup.step - 1.0) > 1e-9)
    throw Error(Errc::InvalidSetup, "step must divide 1");
  if (grid_count(setup.step) / setup.k < 1)
    throw Error(Errc::InvalidSetup, "step is too coarse for k groups");
}

Matrix default_centers(std::size_t k) {
  if (k < 2) throw Error(Errc::InvalidArgument, "need at least two groups");
  Matrix t(k - 1, k);
  for (std::size_t j = 0; j + 1 < k; ++j) t(j, j) = 1.0;
  return t;
}

std::size_t required_crossings(int setup_id) { return setup_id == 3 ? 2 : 1; }

double fixed_alpha2(const ThresholdSetup& setup, std::optional<double> setup1_threshold) {
  if (setup.id == 3) return 0.05;
  if (setup.id != 2) throw Error(Errc::InvalidSetup, "only setups 2 and 3 fix alpha2");
  double t1 = 0.0;
  if (setup1_threshold) {
    t1 = *setup1_threshold;
  } else {
    t1 = find_threshold({1, setup.k, setup.step}).threshold;
  }
  const auto cells = std::llround(t1 / setup.step) + std::llround(0.02 / setup.step);
  return static_cast<double>(cells) / static_cast<double>(grid_count(setup.step));
}

std::vector<std::vector<double>> build_grid(const ThresholdSetup& setup,
                                            std::optional<double> setup1_threshold) {
  validate(setup);
  const std::size_t k = setup.k;
  const double equal = 1.0 / static_cast<double>(k);
  std::optional<double> alpha2;
  if (setup.id != 1) alpha2 = fixed_alpha2(setup, setup1_threshold);

  std::vector<double> alpha1_values{equal};
  const std::size_t n = grid_count(setup.step);
  // Largest i with i * step strictly below 1/k, i.e. i * k < n.
  std::size_t i = (n - 1) / k;
  for (; i >= 1; --i) alpha1_values.push_back(static_cast<double>(i) / static_cast<double>(n));

  std::vector<std::vector<double>> grid;
  grid.reserve(alpha1_values.size());
  for (double a1 : alpha1_values) {
    std::vector<double> row(k, equal);
    row[0] = a1;
    if (alpha2) row[1] = *alpha2;
    double used = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) used += row[j];
    row[k - 1] = 1.0 - used;
    if (row[k - 1] <= 0.0)
      throw Error(Errc::InvalidSetup, "grid row leaves no mass for the last group");
    grid.push_back(std::move(row));
  }
  return grid;
}

ThresholdResult find_threshold(const ThresholdSetup& setup, const ThresholdOptions& options) {
  validate(setup);
  const Matrix centers = options.centers ? *options.centers : default_centers(setup.k);
  if (centers.rows() != setup.k - 1 || centers.cols() != setup.k)
    throw Error(Errc::DimensionMismatch, "centers must be (k-1) x k");
  const auto grid = build_grid(setup, options.setup1_threshold);
  const std::size_t need = required_crossings(setup.id);

  ThresholdResult result;
  result.k = setup.k;
  result.setup = setup.id;
  result.crossing_index = need;
  bool found = false;
  for (const auto& row : grid) {
    const auto rho = theory::dirac_pop_ics(theory::MixtureSpec::dirac(row, centers));
    const bool met = reached(rho) >= need;
    if (found) {
      if (!met)
        throw Error(Errc::NonMonotoneCrossing,
                    "criterion lost again at alpha1 = " + std::to_string(row[0]));
      continue;
    }
    if (met) {
      found = true;
      result.threshold = row[0];
      result.proportions = row;
      result.eigenvalues = rho;
    }
  }
  if (!found)
    throw Error(Errc::NoCrossing, "no crossing for k = " + std::to_string(setup.k) + ", setup " +
                                      std::to_string(setup.id));
  return result;
}

std::vector<ThresholdResult> threshold_table(std::size_t k_min, std::size_t k_max,
                                             const std::vector<int>& setups, double step) {
  if (k_min < 2 || k_max < k_min) throw Error(Errc::InvalidSetup, "need 2 <= k_min <= k_max");
  std::vector<ThresholdResult> out;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    std::optional<double> setup1;
    for (int id : setups) {
      if (id != 1 && k < 3) continue;
      ThresholdOptions options;
      if (id == 2) {
        if (!setup1) setup1 = find_threshold({1, k, step}).threshold;
        options.setup1_threshold = setup1;
      }
      out.push_back(find_threshold({id, k, step}, options));
      if (id == 1) setup1 = out.back().threshold;
    }
  }
  return out;
}

std::vector<ThresholdResult> reproduce_table1(std::size_t k_min, std::size_t k_max) {
  return threshold_table(k_min, k_max, {1, 2, 3}, 0.001);
}

}  // namespace ics::thresholds
