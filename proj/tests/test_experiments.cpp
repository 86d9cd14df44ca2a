#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "ics/error.hpp"
#include "ics/experiments.hpp"
#include "ics/mixture.hpp"
#include "support/bridge.hpp"

using namespace ics;
using namespace ics::experiments;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an ics::Error";
  return Errc::InvalidArgument;
}

Scenario small_scenario(std::vector<double> props, std::size_t p, double delta, std::size_t reps) {
  Scenario s;
  s.name = "test";
  s.proportions = std::move(props);
  s.k = s.proportions.size();
  s.p = p;
  s.delta = delta;
  s.replications = reps;
  s.pairs = {ScatterPair::parse("cov-cov4")};
  s.master_seed = 2025;
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

TernaryCell cell_at(double a1, double a2, double a3) {
  const auto rho = theory::dirac_pop_ics(theory::MixtureSpec::dirac({a1, a2, a3}, default_ternary_centers()));
  return {a1, a2, a3, rho[0], rho[1], classify(rho[0], rho[1])};
}

}  // namespace

TEST(Scenario, Validation) {
  auto s = small_scenario({0.5, 0.5}, 10, 10, 5);
  EXPECT_NO_THROW(validate_scenario(s));
  auto bad = s;
  bad.delta = -1;
  EXPECT_EQ(code_of([&] { validate_scenario(bad); }), Errc::InvalidSpec);
  bad = s;
  bad.p = 1;
  bad.proportions = {0.3, 0.3, 0.4};
  EXPECT_EQ(code_of([&] { validate_scenario(bad); }), Errc::InvalidSpec);
  bad = s;
  bad.n = 10;
  EXPECT_EQ(code_of([&] { validate_scenario(bad); }), Errc::InvalidSpec);
  bad = s;
  bad.pairs.clear();
  EXPECT_EQ(code_of([&] { validate_scenario(bad); }), Errc::InvalidSpec);
  bad = s;
  bad.proportions = {0.5, 0.6};
  EXPECT_EQ(code_of([&] { validate_scenario(bad); }), Errc::InvalidSpec);
}

TEST(Presets, RegistryShape) {
  const auto& all = presets();
  EXPECT_EQ(all.size(), 17u);
  for (const auto& s : all) {
    EXPECT_EQ(s.p, 5 * s.k) << s.name;
    EXPECT_EQ(s.n, 1000u);
    EXPECT_EQ(s.delta, 10.0);
    EXPECT_EQ(s.replications, 50u);
    double sum = 0.0;
    for (double a : s.proportions) sum += a;
    EXPECT_NEAR(sum, 1.0, 1e-12) << s.name;
  }
  EXPECT_EQ(find_preset("k2-2179").proportions, (std::vector<double>{0.21, 0.79}));
  EXPECT_EQ(code_of([] { find_preset("k4-nothing"); }), Errc::UnknownPreset);
}

TEST(Presets, Labels) {
  EXPECT_EQ(proportion_label({0.21, 0.79}), "21-79");
  EXPECT_EQ(proportion_label({0.1, 0.4, 0.5}), "10-40-50");
}

TEST(Config, ParsesKeysAndDefaults) {
  const auto s = parse_scenario_config(
      "# comment\n"
      "name = mine\n"
      "proportions = 10, 40, 50   # percent\n"
      "delta = 7.5\n"
      "n = 400\n"
      "pairs = cov-cov4, tcov-cov\n"
      "replications = 3\n"
      "seed = 11\n");
  EXPECT_EQ(s.name, "mine");
  EXPECT_EQ(s.k, 3u);
  EXPECT_EQ(s.p, 15u);
  EXPECT_EQ(s.n, 400u);
  EXPECT_DOUBLE_EQ(s.delta, 7.5);
  EXPECT_NEAR(s.proportions[0], 0.1, 1e-15);
  ASSERT_EQ(s.pairs.size(), 2u);
  EXPECT_EQ(s.pairs[1].name(), "tcov-cov");
  EXPECT_EQ(s.replications, 3u);
  EXPECT_EQ(s.master_seed, 11u);
  EXPECT_EQ(parse_scenario_config("proportions = 0.5,0.5\npairs = all\n").pairs.size(), 6u);
}

TEST(Config, Errors) {
  for (const char* text : {"proportions = 0.5,0.5\nbogus = 1\n", "proportions = 0.5,0.5\nproportions = 0.5,0.5\n",
                           "k = 3\nproportions = 0.5,0.5\n", "n = 100\n", "proportions = 0.5,0.5\nn = ten\n",
                           "proportions 0.5 0.5\n", "proportions = 0.5,0.6\n", "proportions = 0.5,0.5\ndelta = -2\n",
                           "proportions = 0.5,0.5\npairs = cov-nothing\n", "proportions =\n"}) {
    EXPECT_EQ(code_of([&] { parse_scenario_config(text); }), Errc::ConfigParse) << text;
  }
}

TEST(Sampler, ShapeCentersAndDeterminism) {
  const auto s = small_scenario({0.2, 0.3, 0.5}, 6, 10, 1);
  const Matrix t = scenario_centers(s);
  ASSERT_EQ(t.rows(), 6u);
  ASSERT_EQ(t.cols(), 3u);
  EXPECT_EQ(t(0, 1), 10.0);
  EXPECT_EQ(t(1, 2), 10.0);
  EXPECT_EQ(t(0, 0), 0.0);
  const auto a = sample_mixture(s, 3);
  const auto b = sample_mixture(s, 3);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_mixture(s, 4));
  EXPECT_EQ(a.rows(), 1000u);
  EXPECT_EQ(a.cols(), 6u);
}

TEST(Sampler, ClassProportionsWithinThreeStandardErrors) {
  auto s = small_scenario({0.1, 0.3, 0.6}, 5, 10, 1);
  s.n = 20000;
  const auto sample = sample_mixture_labeled(s, 0);
  std::vector<double> count(3, 0.0);
  for (std::size_t l : sample.labels) count[l] += 1;
  for (std::size_t j = 0; j < 3; ++j) {
    const double a = s.proportions[j];
    const double se = std::sqrt(a * (1 - a) / static_cast<double>(s.n));
    EXPECT_LE(std::abs(count[j] / static_cast<double>(s.n) - a), 3 * se) << j;
  }
}

TEST(Sampler, RowsAreCenterPlusStandardNoise) {
  auto s = small_scenario({0.5, 0.5}, 3, 50, 1);
  s.n = 20000;
  const auto sample = sample_mixture_labeled(s, 0);
  double m0 = 0, m1 = 0, v = 0;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double x = sample.x(i, 0);
    if (sample.labels[i] == 0) {
      m0 += x;
      ++n0;
    } else {
      m1 += x;
      ++n1;
    }
    v += sample.x(i, 2) * sample.x(i, 2);
  }
  EXPECT_NEAR(m0 / n0, 0.0, 0.05);
  EXPECT_NEAR(m1 / n1, 50.0, 0.05);
  EXPECT_NEAR(v / s.n, 1.0, 0.05);
}

TEST(Sampler, FarTwoGroupCovarianceMatchesDiracEngine) {
  auto s = small_scenario({0.3, 0.7}, 3, 100, 1);
  s.n = 20000;
  const auto x = bridge::to_data(sample_mixture(s, 0));
  const auto cov = oracle::covariance(x, oracle::all_rows(x));
  const auto dirac = theory::dirac_pop_cov(theory::MixtureSpec::dirac(s.proportions, Matrix::from_rows({{0, 100}})));
  EXPECT_NEAR(cov[0][0] / dirac(0, 0), 1.0, 1e-2);
}

TEST(Replications, CollapsedMixtureHasUnitSpectrum) {
  const auto records = run_replications(small_scenario({0.5, 0.5}, 10, 0, 5));
  for (const auto& rec : records) {
    ASSERT_TRUE(rec.ok);
    for (double rho : rec.eigenvalues) EXPECT_NEAR(rho, 1.0, 0.25);
  }
}

TEST(Replications, BitIdenticalAcrossThreadCounts) {
  auto s = small_scenario({0.2, 0.3, 0.5}, 8, 10, 6);
  s.n = 300;
  s.pairs = {ScatterPair::parse("cov-cov4"), ScatterPair::parse("mcd50-cov")};
  RunOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = run_replications(s, one);
  const auto b = run_replications(s, four);
  ASSERT_EQ(a.size(), 12u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].replicate, b[i].replicate);
    EXPECT_EQ(a[i].pair, b[i].pair);
    EXPECT_EQ(a[i].eigenvalues, b[i].eigenvalues);
    EXPECT_EQ(a[i].selected, b[i].selected);
  }
  EXPECT_EQ(a[0].pair, "cov-cov4");
  EXPECT_EQ(a[1].pair, "mcd50-cov");
  EXPECT_EQ(a[2].replicate, 2u);
}

TEST(Replications, RecordsAreDescendingWithKMinusOneSelections) {
  auto s = small_scenario({0.2, 0.3, 0.5}, 8, 10, 3);
  for (const auto& rec : run_replications(s)) {
    ASSERT_TRUE(rec.ok);
    EXPECT_TRUE(std::is_sorted(rec.eigenvalues.rbegin(), rec.eigenvalues.rend()));
    EXPECT_EQ(rec.selected.size(), 2u);
  }
}

TEST(Replications, TwoGroupSelectionPatterns) {
  auto rate = [](std::vector<double> props, std::size_t ic) {
    auto s = small_scenario(std::move(props), 10, 10, 20);
    std::size_t hits = 0;
    for (const auto& rec : run_replications(s)) hits += rec.ok && rec.selected == std::vector<std::size_t>{ic};
    return hits / 20.0;
  };
  EXPECT_GE(rate({0.5, 0.5}, 10), 0.9);
  EXPECT_GE(rate({0.1, 0.9}, 1), 0.9);
}

TEST(Heatmap, Bookkeeping) {
  std::vector<ReplicationRecord> recs;
  for (std::size_t r = 1; r <= 4; ++r) recs.push_back({"s", r, "cov-cov4", {4, 3, 2, 1, 0.5}, {1}, true, ""});
  auto cells = aggregate_heatmap(recs, 2);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].ic, 1u);
  EXPECT_EQ(cells[0].percent, 100.0);
  EXPECT_EQ(cells[1].ic, 5u);
  EXPECT_EQ(cells[1].percent, 0.0);

  // Failures are excluded from the denominator.
  recs.push_back({"s", 5, "cov-cov4", {}, {}, false, "boom"});
  recs[0].selected = {5};
  cells = aggregate_heatmap(recs, 2);
  EXPECT_EQ(cells[0].successful, 4u);
  EXPECT_EQ(cells[0].percent, 75.0);
  EXPECT_EQ(cells[1].percent, 25.0);
}

TEST(Heatmap, RowsSumToSelectionCountTimesHundred) {
  auto s = small_scenario({0.2, 0.3, 0.5}, 8, 10, 5);
  const auto cells = aggregate_heatmap(run_replications(s), 3);
  double total = 0.0;
  for (const auto& c : cells) total += c.percent;
  EXPECT_NEAR(total, 200.0, 1e-9);
  std::vector<std::size_t> ics;
  for (const auto& c : cells) ics.push_back(c.ic);
  EXPECT_EQ(ics, (std::vector<std::size_t>{1, 2, 7, 8}));
}

TEST(Heatmap, BalancedThreeGroupsUseLastComponents) {
  auto s = find_preset("k3-33-33-34");
  s.replications = 10;
  s.master_seed = 3;
  double last = 0.0;
  for (const auto& c : aggregate_heatmap(run_replications(s), 3))
    if (c.ic >= s.p - 1) last += c.percent;
  EXPECT_GE(last, 180.0);
}

TEST(Heatmap, EmptyInput) {
  EXPECT_EQ(code_of([] { aggregate_heatmap({}, 2); }), Errc::EmptyInput);
}

TEST(Ternary, ReferenceCells) {
  EXPECT_EQ(cell_at(1.0 / 3, 1.0 / 3, 1.0 / 3).cls, TernaryClass::BothBelow);
  EXPECT_EQ(cell_at(0.1, 0.1, 0.8).cls, TernaryClass::BothAbove);
  const auto split = cell_at(0.1, 0.45, 0.45);
  EXPECT_EQ(split.cls, TernaryClass::Split);
  EXPECT_GT(split.rho1, 1.0);
  EXPECT_LT(split.rho2, 1.0);
  EXPECT_EQ(cell_at(0.6, 0.2, 0.2).cls, TernaryClass::OnBoundary);
  EXPECT_EQ(class_name(TernaryClass::OnBoundary), "on_boundary");
  EXPECT_EQ(class_name(TernaryClass::BothBelow), "both_below");
}

TEST(Ternary, GridCountAndSums) {
  const auto cells = ternary_grid(0.01);
  EXPECT_EQ(cells.size(), 4851u);
  for (const auto& c : cells) {
    EXPECT_NEAR(c.alpha1 + c.alpha2 + c.alpha3, 1.0, 1e-12);
    EXPECT_GT(c.alpha3, 0.0);
    EXPECT_GE(c.rho1, c.rho2);
    EXPECT_EQ(c.cls, classify(c.rho1, c.rho2));
  }
  EXPECT_EQ(code_of([] { ternary_grid(0.03); }), Errc::InvalidArgument);
}

TEST(Ternary, PermutationSymmetry) {
  std::map<std::tuple<long, long, long>, std::pair<double, double>> by_key;
  const auto cells = ternary_grid(0.02);
  for (const auto& c : cells)
    by_key[{std::lround(c.alpha1 * 50), std::lround(c.alpha2 * 50), std::lround(c.alpha3 * 50)}] = {c.rho1, c.rho2};
  for (const auto& [key, rho] : by_key) {
    const auto [a, b, c] = key;
    for (const auto& perm : {std::tuple{b, a, c}, std::tuple{c, b, a}, std::tuple{a, c, b}}) {
      const auto& other = by_key.at(perm);
      EXPECT_NEAR(other.first, rho.first, 1e-9);
      EXPECT_NEAR(other.second, rho.second, 1e-9);
    }
  }
}

TEST(Ternary, AdjacentCellsNeverJumpFromBelowToAbove) {
  const auto cells = ternary_grid(0.01);
  std::map<std::pair<long, long>, TernaryClass> cls;
  for (const auto& c : cells) cls[{std::lround(c.alpha1 * 100), std::lround(c.alpha2 * 100)}] = c.cls;
  auto opposite = [](TernaryClass a, TernaryClass b) {
    return (a == TernaryClass::BothBelow && b == TernaryClass::BothAbove) ||
           (a == TernaryClass::BothAbove && b == TernaryClass::BothBelow);
  };
  for (const auto& [key, c] : cls) {
    for (const auto& next : {std::pair{key.first + 1, key.second}, std::pair{key.first, key.second + 1},
                             std::pair{key.first + 1, key.second - 1}}) {
      const auto it = cls.find(next);
      if (it != cls.end()) EXPECT_FALSE(opposite(c, it->second)) << key.first << "," << key.second;
    }
  }
}

TEST(CenterConfigurations, RangeRankAndDeterminism) {
  const auto a = center_configurations(5, 3, 6, 20, 1);
  ASSERT_EQ(a.size(), 20u);
  for (const auto& t : a) {
    ASSERT_EQ(t.rows(), 6u);
    ASSERT_EQ(t.cols(), 5u);
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 5; ++c) {
        const double v = t(r, c);
        EXPECT_EQ(v, std::round(v));
        EXPECT_GE(v, -2000.0);
        EXPECT_LE(v, 15000.0);
        if (r >= 3 || c == 4) EXPECT_EQ(v, 0.0);
      }
  }
  EXPECT_EQ(center_configurations(5, 3, 6, 20, 1), a);
  EXPECT_NE(center_configurations(5, 3, 6, 20, 2), a);
  EXPECT_EQ(code_of([] { center_configurations(3, 3, 4); }), Errc::InvalidArgument);
}

TEST(Profile, UnknownConfig) {
  EXPECT_EQ(code_of([] { eigen_profile("nothing"); }), Errc::UnknownConfig);
  EXPECT_EQ(profile_names().size(), 4u);
}

namespace {

// Spread (max - min) of each (panel, scenario, index) group.
std::map<std::string, double> spreads(const std::vector<ProfileRow>& rows) {
  std::map<std::string, std::pair<double, double>> range;
  for (const auto& r : rows) {
    const std::string key = r.panel + "|" + r.scenario + "|" + std::to_string(r.index);
    auto [it, fresh] = range.try_emplace(key, r.value, r.value);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.value);
      it->second.second = std::max(it->second.second, r.value);
    }
  }
  std::map<std::string, double> out;
  for (const auto& [key, mm] : range) out[key] = mm.second - mm.first;
  return out;
}

}  // namespace

TEST(Profile, FullRankDiracHasNoSpread) {
  ProfileOptions opt;
  opt.configurations = 20;
  const auto rows = eigen_profile("dirac-full-rank", opt);
  ASSERT_FALSE(rows.empty());
  for (const auto& [key, spread] : spreads(rows)) EXPECT_LE(spread, 1e-8) << key;
}

TEST(Profile, ReducedRankDiracSpreadsAcrossOne) {
  const auto rows = eigen_profile("dirac-reduced-rank");
  const auto s = spreads(rows);
  double widest = 0.0;
  for (const auto& [key, spread] : s) widest = std::max(widest, spread);
  EXPECT_GT(widest, 0.1);
  // Some scenario has values on both sides of 1 across center configurations.
  std::map<std::string, std::pair<bool, bool>> sides;
  for (const auto& r : rows) {
    auto& side = sides[r.panel + "|" + r.scenario + "|" + std::to_string(r.index)];
    side.first = side.first || r.value < 1.0;
    side.second = side.second || r.value > 1.0;
  }
  EXPECT_TRUE(std::any_of(sides.begin(), sides.end(), [](const auto& kv) { return kv.second.first && kv.second.second; }));
}

TEST(Profile, GaussianPopulationKeepsNoiseEigenvalues) {
  ProfileOptions opt;
  opt.configurations = 5;
  const auto rows = eigen_profile("gaussian-population", opt);
  std::map<std::string, std::size_t> ones;
  for (const auto& r : rows)
    if (std::abs(r.value - 1.0) <= 1e-10) ++ones[r.panel + "|" + r.scenario + "|" + std::to_string(r.unit)];
  for (const auto& [key, count] : ones) {
    const std::size_t q = key[key.find("q=") + 2] - '0';
    EXPECT_GE(count, 6 - q) << key;
  }
}

TEST(Sampled, TwoGroupThresholdScenarioStaysNearOne) {
  // Per-index medians over replicates: single draws carry sampling spread of
  // the extreme order statistics (about 0.1 at n = 1000, p = 10).
  for (double delta : {1.0, 10.0, 100.0}) {
    auto s = find_preset("k2-2179");
    s.delta = delta;
    s.replications = 20;
    s.master_seed = 5;
    const auto records = run_replications(s);
    for (std::size_t i = 0; i < s.p; ++i) {
      std::vector<double> column;
      for (const auto& rec : records) column.push_back(rec.eigenvalues[i]);
      EXPECT_NEAR(median(column), 1.0, 0.1) << delta << " index " << i + 1;
    }
  }
}

TEST(Sampled, FarGroupsApproachTheSeparationLimit) {
  for (const char* name : {"k2-1090", "k3-10-40-50"}) {
    for (double delta : {50.0, 100.0}) {
      auto s = find_preset(name);
      s.delta = delta;
      s.replications = 10;
      s.master_seed = 9;
      const std::size_t q = s.k - 1;
      Matrix t(q, s.k);
      for (std::size_t l = 1; l < s.k; ++l) t(l - 1, l) = 1.0;
      std::vector<double> expect(s.p - q, 1.0);
      for (double rho : theory::dirac_pop_ics(theory::MixtureSpec::dirac(s.proportions, t)))
        expect.push_back(theory::gaussian_separation_limit(rho, s.p, q));
      std::sort(expect.rbegin(), expect.rend());

      // Signal indices follow the limit; noise indices only average to 1 since
      // sample eigenvalues of a spherical block spread by about sqrt(p/n).
      const auto records = run_replications(s);
      double noise = 0.0;
      for (std::size_t i = 0; i < s.p; ++i) {
        std::vector<double> column;
        for (const auto& rec : records) column.push_back(rec.eigenvalues[i]);
        if (expect[i] == 1.0) {
          noise += median(column) / static_cast<double>(s.p - q);
          continue;
        }
        EXPECT_NEAR(median(column), expect[i], 0.05) << name << " delta " << delta << " index " << i + 1;
      }
      EXPECT_NEAR(noise, 1.0, 0.02) << name << " delta " << delta;
    }
  }
}
