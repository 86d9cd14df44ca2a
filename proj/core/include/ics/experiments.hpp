#pragma once

// Simulation scenarios with their sampler and replication runner, plus the
// population grids (ternary map, eigenvalue profiles) built on the engines.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ics/engine.hpp"
#include "ics/matlin.hpp"
#include "ics/scatter.hpp"

namespace ics::experiments {

/// sum_j alpha_j N_p(t_j, I_p) with t_1 = 0 and t_{l+1} = delta e_l.
struct Scenario {
  std::string name;
  std::size_t k = 2;
  std::size_t p = 10;
  std::size_t n = 1000;
  double delta = 10.0;
  std::vector<double> proportions;
  std::vector<ScatterPair> pairs;
  std::size_t replications = 50;
  std::uint64_t master_seed = 0;
};

/// Throws InvalidSpec unless proportions are valid (renormalized in place),
/// delta >= 0, p > k - 1, n > p and at least one pair and replicate are given.
void validate_scenario(Scenario& scenario);

/// The six pairs compared in the selection heatmaps.
std::vector<ScatterPair> all_pairs();

/// Registered scenario presets (p = 5k, n = 1000, delta = 10, 50 replicates, cov-cov4).
const std::vector<Scenario>& presets();
/// Throws UnknownPreset.
Scenario find_preset(const std::string& name);

/// Flat `key = value` text; keys k, n, p, delta, proportions, pairs,
/// replications, seed (and an optional name). Blank lines and '#' comments are
/// skipped. Throws ConfigParse.
Scenario parse_scenario_config(const std::string& text);

/// Percent label such as "21-79".
std::string proportion_label(const std::vector<double>& proportions);

/// Group centers (p x k) of a scenario.
Matrix scenario_centers(const Scenario& scenario);

struct Sample {
  DataMatrix x;
  std::vector<std::size_t> labels;  // 0-based component of each row
};

/// n draws whose random stream depends only on (master_seed, replicate).
Sample sample_mixture_labeled(const Scenario& scenario, std::size_t replicate);
DataMatrix sample_mixture(const Scenario& scenario, std::size_t replicate);

struct ReplicationRecord {
  std::string scenario;
  std::size_t replicate = 0;  // 1-based
  std::string pair;
  std::vector<double> eigenvalues;
  std::vector<std::size_t> selected;  // 1-based
  bool ok = true;
  std::string error;
};

struct RunOptions {
  std::size_t threads = 0;  // 0: hardware concurrency
  McdOptions mcd;
};

/// Replicate-major, pair-minor records. Estimator failures become records with
/// ok = false. Bit-identical for a fixed master_seed whatever the thread count.
std::vector<ReplicationRecord> run_replications(const Scenario& scenario,
                                                const RunOptions& options = {});

struct HeatmapCell {
  std::string scenario;
  std::string pair;
  std::size_t ic = 0;          // 1-based component index
  double percent = 0.0;        // over successful replicates
  std::size_t successful = 0;
};

/// Selection percentages for components 1..k-1 and p-k+2..p of every
/// (scenario, pair) in first-appearance order. Throws EmptyInput.
std::vector<HeatmapCell> aggregate_heatmap(const std::vector<ReplicationRecord>& records,
                                           std::size_t k);

enum class TernaryClass { BothBelow, Split, BothAbove, OnBoundary };
std::string class_name(TernaryClass c);

struct TernaryCell {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  TernaryClass cls = TernaryClass::BothBelow;
};

/// Centers (200, 0), (400, 100), (0, 0) as columns.
Matrix default_ternary_centers();

/// Classifies against 1 +- tol.
TernaryClass classify(double rho1, double rho2, double tol = 1e-8);

/// Every composition with positive multiples of step, alpha1 outer, alpha2 inner.
/// Throws InvalidArgument when step does not divide 1.
std::vector<TernaryCell> ternary_grid(double step = 0.001);
std::vector<TernaryCell> ternary_grid(double step, const Matrix& centers);

/// Integer center configurations in [-2000, 15000]: the first q rows of t_1..t_{k-1}
/// are drawn, t_k = 0, all other rows zero. Each configuration has rank q and
/// distinct centers.
std::vector<Matrix> center_configurations(std::size_t k, std::size_t q, std::size_t p,
                                          std::size_t count = 20, std::uint64_t seed = 1);

struct ProfileRow {
  std::string panel;     // e.g. "k=3,q=2"
  std::string scenario;  // proportion label, suffixed with delta for sampled grids
  std::size_t unit = 0;  // center configuration or replicate, 1-based
  std::size_t index = 0; // eigenvalue index, 1-based
  double value = 0.0;
};

struct ProfileOptions {
  std::size_t configurations = 20;
  std::size_t replications = 50;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

/// Registered grids:
///   gaussian-population  exact Gaussian engine, p = 6, (k,q) in {(2,1),(3,1),(3,2),(5,4)}
///   dirac-full-rank      exact Dirac engine, p = q = k - 1, k in {2,3,5,10}
///   dirac-reduced-rank   exact Dirac engine, p = q < k - 1, (k,q) in {(3,1),(5,1),(5,2),(5,3)}
///   sampled-delta        sampled presets with delta in {1,5,10,50,100}, cov-cov4
/// Throws UnknownConfig.
std::vector<ProfileRow> eigen_profile(const std::string& config, const ProfileOptions& options = {});
std::vector<std::string> profile_names();

}  // namespace ics::experiments
