#include "ics/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "ics/error.hpp"
#include "ics/mixture.hpp"
#include "ics/random.hpp"

namespace ics::experiments {

namespace {

// Stream purposes under one (seed, replicate).
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kEstimatorStream = 2;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

Scenario make_preset(std::string name, std::vector<double> percents) {
  Scenario s;
  s.name = std::move(name);
  s.k = percents.size();
  s.p = 5 * s.k;
  for (double v : percents) s.proportions.push_back(v / 100.0);
  s.pairs = {ScatterPair::parse("cov-cov4")};
  validate_scenario(s);
  return s;
}

std::vector<double> repeat(double v, std::size_t times) { return std::vector<double>(times, v); }

std::vector<double> concat(std::vector<std::vector<double>> parts) {
  std::vector<double> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(Errc::ConfigParse, "key '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::ConfigParse, "key '" + key + "' expects a number, got '" + value + "'");
  }
}

}  // namespace

void validate_scenario(Scenario& s) {
  s.proportions = theory::validate_proportions(std::move(s.proportions));
  s.k = s.proportions.size();
  if (!(s.delta >= 0.0) || !std::isfinite(s.delta))
    throw Error(Errc::InvalidSpec, "delta must be a finite non-negative number");
  if (s.p < s.k) throw Error(Errc::InvalidSpec, "need p > k - 1");
  if (s.n <= s.p) throw Error(Errc::InvalidSpec, "need n > p");
  if (s.pairs.empty()) throw Error(Errc::InvalidSpec, "no scatter pairs");
  if (s.replications == 0) throw Error(Errc::InvalidSpec, "need at least one replicate");
}

std::vector<ScatterPair> all_pairs() {
  std::vector<ScatterPair> out;
  for (const char* name : {"cov-cov4", "covaxis-cov", "tcov-cov", "mcd25-cov", "mcd50-cov", "mcd75-cov"})
    out.push_back(ScatterPair::parse(name));
  return out;
}

const std::vector<Scenario>& presets() {
  static const std::vector<Scenario> registry = [] {
    std::vector<Scenario> r;
    r.push_back(make_preset("k2-5050", {50, 50}));
    r.push_back(make_preset("k2-4060", {40, 60}));
    r.push_back(make_preset("k2-3070", {30, 70}));
    r.push_back(make_preset("k2-2179", {21, 79}));
    r.push_back(make_preset("k2-1090", {10, 90}));
    r.push_back(make_preset("k3-33-33-34", {33, 33, 34}));
    r.push_back(make_preset("k3-18-32-50", {18, 32, 50}));
    r.push_back(make_preset("k3-10-40-50", {10, 40, 50}));
    r.push_back(make_preset("k3-10-30-60", {10, 30, 60}));
    r.push_back(make_preset("k3-10-80-10", {10, 80, 10}));
    r.push_back(make_preset("k5-20-20-20-20-20", {20, 20, 20, 20, 20}));
    r.push_back(make_preset("k5-14-20-20-20-26", {14, 20, 20, 20, 26}));
    r.push_back(make_preset("k5-10-20-20-20-30", {10, 20, 20, 20, 30}));
    r.push_back(make_preset("k5-10-10-20-20-40", {10, 10, 20, 20, 40}));
    r.push_back(make_preset("k10-10x10", repeat(10, 10)));
    r.push_back(make_preset("k10-8-10x8-12", concat({{8}, repeat(10, 8), {12}})));
    r.push_back(make_preset("k10-5x7-15-20-30", concat({repeat(5, 7), {15, 20, 30}})));
    return r;
  }();
  return registry;
}

Scenario find_preset(const std::string& name) {
  for (const auto& s : presets())
    if (s.name == name) return s;
  throw Error(Errc::UnknownPreset, "no preset named '" + name + "'");
}

Scenario parse_scenario_config(const std::string& text) {
  Scenario s;
  s.name = "config";
  std::map<std::string, std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::ConfigParse, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw Error(Errc::ConfigParse, "line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    if (!seen.emplace(key, value).second)
      throw Error(Errc::ConfigParse, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }

  bool explicit_p = false;
  std::size_t declared_k = 0;
  for (const auto& [key, value] : seen) {
    if (key == "name") {
      s.name = value;
    } else if (key == "k") {
      declared_k = parse_size(key, value);
    } else if (key == "n") {
      s.n = parse_size(key, value);
    } else if (key == "p") {
      s.p = parse_size(key, value);
      explicit_p = true;
    } else if (key == "delta") {
      s.delta = parse_real(key, value);
    } else if (key == "proportions") {
      s.proportions.clear();
      for (const auto& item : split(value, ',')) s.proportions.push_back(parse_real(key, item));
    } else if (key == "pairs") {
      s.pairs.clear();
      if (value == "all") {
        s.pairs = all_pairs();
      } else {
        for (const auto& item : split(value, ',')) {
          try {
            s.pairs.push_back(ScatterPair::parse(item));
          } catch (const Error& e) {
            throw Error(Errc::ConfigParse, std::string("pairs: ") + e.what());
          }
        }
      }
    } else if (key == "replications") {
      s.replications = parse_size(key, value);
    } else if (key == "seed") {
      s.master_seed = parse_size(key, value);
    } else {
      throw Error(Errc::ConfigParse, "unknown key '" + key + "'");
    }
  }
  if (s.proportions.empty()) throw Error(Errc::ConfigParse, "missing key 'proportions'");
  // Percentages such as "21,79" are accepted as well as fractions.
  double total = 0.0;
  for (double a : s.proportions) total += a;
  if (std::abs(total - 100.0) <= 1e-9)
    for (double& a : s.proportions) a /= 100.0;
  if (declared_k != 0 && declared_k != s.proportions.size())
    throw Error(Errc::ConfigParse, "k = " + std::to_string(declared_k) + " but " +
                                       std::to_string(s.proportions.size()) + " proportions given");
  if (s.pairs.empty()) s.pairs = {ScatterPair::parse("cov-cov4")};
  if (!explicit_p) s.p = 5 * s.proportions.size();
  try {
    validate_scenario(s);
  } catch (const Error& e) {
    throw Error(Errc::ConfigParse, e.what());
  }
  return s;
}

std::string proportion_label(const std::vector<double>& proportions) {
  std::string out;
  for (std::size_t j = 0; j < proportions.size(); ++j) {
    if (j) out += '-';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", 100.0 * proportions[j]);
    out += buf;
  }
  return out;
}

Matrix scenario_centers(const Scenario& s) {
  Matrix t(s.p, s.k);
  for (std::size_t l = 1; l < s.k; ++l) t(l - 1, l) = s.delta;
  return t;
}

Sample sample_mixture_labeled(const Scenario& s, std::size_t replicate) {
  CounterRng rng(s.master_seed, derive_stream(replicate, kSampleStream));
  std::vector<double> cumulative(s.k);
  double acc = 0.0;
  for (std::size_t j = 0; j < s.k; ++j) cumulative[j] = acc += s.proportions[j];

  Sample out{DataMatrix(s.n, s.p), std::vector<std::size_t>(s.n)};
  for (std::size_t i = 0; i < s.n; ++i) {
    const double u = rng.uniform() * acc;
    std::size_t label = 0;
    while (label + 1 < s.k && u > cumulative[label]) ++label;
    out.labels[i] = label;
    auto row = out.x.row(i);
    for (std::size_t c = 0; c < s.p; ++c) row[c] = rng.normal();
    if (label > 0) row[label - 1] += s.delta;
  }
  return out;
}

DataMatrix sample_mixture(const Scenario& s, std::size_t replicate) {
  return sample_mixture_labeled(s, replicate).x;
}

std::vector<ReplicationRecord> run_replications(const Scenario& scenario, const RunOptions& options) {
  Scenario s = scenario;
  validate_scenario(s);
  const std::size_t pairs = s.pairs.size();
  std::vector<ReplicationRecord> records(s.replications * pairs);
  IcsOptions ics_options;
  ics_options.mcd = options.mcd;

  parallel_for(s.replications, options.threads, [&](std::size_t r) {
    const DataMatrix x = sample_mixture(s, r);
    for (std::size_t j = 0; j < pairs; ++j) {
      ReplicationRecord& rec = records[r * pairs + j];
      rec.scenario = s.name;
      rec.replicate = r + 1;
      rec.pair = s.pairs[j].name();
      try {
        CounterRng rng(s.master_seed, derive_stream(r, kEstimatorStream, j));
        IcsResult fit = ics_fit(x, s.pairs[j], rng, ics_options);
        rec.selected = select_med(fit.eigenvalues, s.k - 1).indices;
        rec.eigenvalues = std::move(fit.eigenvalues);
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.eigenvalues.clear();
        rec.selected.clear();
      }
    }
  });
  return records;
}

std::vector<HeatmapCell> aggregate_heatmap(const std::vector<ReplicationRecord>& records,
                                           std::size_t k) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no replication records");
  if (k < 2) throw Error(Errc::InvalidArgument, "need k >= 2");

  struct Group {
    std::string scenario, pair;
    std::size_t p = 0, successful = 0;
    std::map<std::size_t, std::size_t> counts;
  };
  std::vector<Group> groups;
  for (const auto& rec : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.scenario == rec.scenario && g.pair == rec.pair;
    });
    if (it == groups.end()) {
      groups.push_back({rec.scenario, rec.pair, 0, 0, {}});
      it = groups.end() - 1;
    }
    if (!rec.ok) continue;
    it->p = std::max(it->p, rec.eigenvalues.size());
    ++it->successful;
    for (std::size_t idx : rec.selected) ++it->counts[idx];
  }

  std::vector<HeatmapCell> out;
  for (const auto& g : groups) {
    std::vector<std::size_t> ics;
    for (std::size_t i = 1; i < k; ++i) ics.push_back(i);
    if (g.p >= k)
      for (std::size_t i = g.p - k + 2; i <= g.p; ++i) ics.push_back(i);
    std::sort(ics.begin(), ics.end());
    ics.erase(std::unique(ics.begin(), ics.end()), ics.end());
    for (std::size_t ic : ics) {
      HeatmapCell cell{g.scenario, g.pair, ic, 0.0, g.successful};
      const auto found = g.counts.find(ic);
      if (g.successful > 0 && found != g.counts.end())
        cell.percent = 100.0 * static_cast<double>(found->second) / static_cast<double>(g.successful);
      out.push_back(cell);
    }
  }
  return out;
}

std::string class_name(TernaryClass c) {
  switch (c) {
    case TernaryClass::BothBelow: return "both_below";
    case TernaryClass::Split: return "split";
    case TernaryClass::BothAbove: return "both_above";
    case TernaryClass::OnBoundary: return "on_boundary";
  }
  return "unknown";
}

Matrix default_ternary_centers() { return Matrix::from_rows({{200, 400, 0}, {0, 100, 0}}); }

TernaryClass classify(double rho1, double rho2, double tol) {
  if (std::abs(rho1 - 1.0) <= tol || std::abs(rho2 - 1.0) <= tol) return TernaryClass::OnBoundary;
  if (rho1 < 1.0 && rho2 < 1.0) return TernaryClass::BothBelow;
  if (rho1 > 1.0 && rho2 > 1.0) return TernaryClass::BothAbove;
  return TernaryClass::Split;
}

std::vector<TernaryCell> ternary_grid(double step) {
  return ternary_grid(step, default_ternary_centers());
}

std::vector<TernaryCell> ternary_grid(double step, const Matrix& centers) {
  if (!(step > 0.0 && step < 1.0)) throw Error(Errc::InvalidArgument, "step must lie in (0, 1)");
  const long long total = std::llround(1.0 / step);
  if (std::abs(static_cast<double>(total) * step - 1.0) > 1e-9)
    throw Error(Errc::InvalidArgument, "step must divide 1");
  if (centers.rows() != 2 || centers.cols() != 3)
    throw Error(Errc::DimensionMismatch, "ternary centers must be 2 x 3");

  std::vector<TernaryCell> cells;
  if (total < 3) return cells;
  cells.reserve(static_cast<std::size_t>((total - 1) * (total - 2) / 2));
  const double n = static_cast<double>(total);
  for (long long i = 1; i <= total - 2; ++i) {
    for (long long j = 1; i + j <= total - 1; ++j) {
      TernaryCell c;
      c.alpha1 = static_cast<double>(i) / n;
      c.alpha2 = static_cast<double>(j) / n;
      c.alpha3 = static_cast<double>(total - i - j) / n;
      const auto rho = theory::dirac_pop_ics(
          theory::MixtureSpec::dirac({c.alpha1, c.alpha2, c.alpha3}, centers));
      c.rho1 = rho[0];
      c.rho2 = rho[1];
      c.cls = classify(c.rho1, c.rho2);
      cells.push_back(c);
    }
  }
  return cells;
}

std::vector<Matrix> center_configurations(std::size_t k, std::size_t q, std::size_t p,
                                          std::size_t count, std::uint64_t seed) {
  if (k < 2 || q < 1 || q > k - 1 || q > p)
    throw Error(Errc::InvalidArgument, "need 1 <= q <= min(k - 1, p)");
  CounterRng rng(seed, derive_stream(k, q, p));
  std::vector<Matrix> out;
  while (out.size() < count) {
    Matrix t(p, k);
    for (std::size_t r = 0; r < q; ++r)
      for (std::size_t l = 0; l + 1 < k; ++l)
        t(r, l) = static_cast<double>(static_cast<long long>(rng.below(17001)) - 2000);
    // Rank q of [t_1 .. t_{k-1}] (t_k = 0) and pairwise distinct centers.
    Matrix gram(q, q);
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = 0; b < q; ++b)
        for (std::size_t l = 0; l + 1 < k; ++l) gram(a, b) += t(a, l) * t(b, l);
    bool ok = true;
    try {
      SpdMatrix check(gram);
    } catch (const Error&) {
      ok = false;
    }
    for (std::size_t a = 0; ok && a < k; ++a)
      for (std::size_t b = a + 1; ok && b < k; ++b) {
        bool same = true;
        for (std::size_t r = 0; r < q; ++r) same = same && t(r, a) == t(r, b);
        ok = !same;
      }
    if (ok) out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> profile_names() {
  return {"gaussian-population", "dirac-full-rank", "dirac-reduced-rank", "sampled-delta"};
}

namespace {

std::vector<std::vector<double>> preset_proportions(std::size_t k) {
  std::vector<std::vector<double>> out;
  for (const auto& s : presets())
    if (s.k == k) out.push_back(s.proportions);
  return out;
}

std::string panel_name(std::size_t k, std::size_t q) {
  return "k=" + std::to_string(k) + ",q=" + std::to_string(q);
}

void population_rows(std::vector<ProfileRow>& rows, std::size_t k, std::size_t q, std::size_t p,
                     bool gaussian, const ProfileOptions& options) {
  const auto configs = center_configurations(k, q, p, options.configurations, options.seed);
  for (const auto& props : preset_proportions(k)) {
    for (std::size_t c = 0; c < configs.size(); ++c) {
      std::vector<double> rho;
      if (gaussian) {
        rho = theory::gauss_pop_ics(theory::MixtureSpec::gaussian(props, configs[c], q));
      } else {
        rho = theory::dirac_pop_ics(theory::MixtureSpec::dirac(props, configs[c]));
      }
      for (std::size_t i = 0; i < rho.size(); ++i)
        rows.push_back({panel_name(k, q), proportion_label(props), c + 1, i + 1, rho[i]});
    }
  }
}

}  // namespace

std::vector<ProfileRow> eigen_profile(const std::string& config, const ProfileOptions& options) {
  std::vector<ProfileRow> rows;
  if (config == "gaussian-population") {
    for (auto [k, q] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}, {3, 1}, {3, 2}, {5, 4}})
      population_rows(rows, k, q, 6, true, options);
  } else if (config == "dirac-full-rank") {
    for (std::size_t k : {2u, 3u, 5u, 10u}) population_rows(rows, k, k - 1, k - 1, false, options);
  } else if (config == "dirac-reduced-rank") {
    for (auto [k, q] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 1}, {5, 1}, {5, 2}, {5, 3}})
      population_rows(rows, k, q, q, false, options);
  } else if (config == "sampled-delta") {
    RunOptions run;
    run.threads = options.threads;
    for (const auto& preset : presets()) {
      for (double delta : {1.0, 5.0, 10.0, 50.0, 100.0}) {
        Scenario s = preset;
        s.delta = delta;
        s.replications = options.replications;
        s.master_seed = options.seed;
        const std::string label = proportion_label(s.proportions) + ",delta=" + std::to_string(static_cast<int>(delta));
        for (const auto& rec : run_replications(s, run)) {
          if (!rec.ok) continue;
          for (std::size_t i = 0; i < rec.eigenvalues.size(); ++i)
            rows.push_back({panel_name(s.k, s.k - 1), label, rec.replicate, i + 1, rec.eigenvalues[i]});
        }
      }
    }
  } else {
    throw Error(Errc::UnknownConfig, "no profile grid named '" + config + "'");
  }
  return rows;
}

}  // namespace ics::experiments
