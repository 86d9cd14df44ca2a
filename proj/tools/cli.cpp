#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ics/engine.hpp"
#include "ics/error.hpp"
#include "ics/experiments.hpp"
#include "ics/mixture.hpp"
#include "ics/random.hpp"
#include "ics/thresholds.hpp"
#include "io.hpp"

namespace ics::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string output;
  std::string format = "json";
  bool format_given = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

std::string resolved_format(const Globals& g, const char* fallback) {
  return g.format_given ? g.format : fallback;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& what, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(Errc::InvalidArgument, what + ": '" + s + "' is not a number");
  return v;
}

// Decimal or a/b.
double parse_fraction(const std::string& what, const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_number(what, s);
  const double den = parse_number(what, s.substr(slash + 1));
  if (den == 0.0) throw Error(Errc::InvalidArgument, what + ": zero denominator");
  return parse_number(what, s.substr(0, slash)) / den;
}

std::vector<double> parse_list(const std::string& what, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_number(what, item));
  return out;
}

// Fractions, or percentages summing to 100.
std::vector<double> parse_proportions(const std::string& s) {
  auto props = parse_list("--props", s);
  double total = 0.0;
  for (double a : props) total += a;
  if (std::abs(total - 100.0) <= 1e-9)
    for (double& a : props) a /= 100.0;
  return props;
}

// "x,y;x,y;..." one group per ';'. Columns of the result are the groups.
Matrix parse_centers(const std::string& s, std::size_t k) {
  if (s.empty() || s == "default") return thresholds::default_centers(k);
  const auto groups = split(s, ';');
  if (groups.size() != k)
    throw Error(Errc::InvalidArgument, "--centers lists " + std::to_string(groups.size()) +
                                           " groups, --props lists " + std::to_string(k));
  std::vector<std::vector<double>> coords;
  for (const auto& g : groups) coords.push_back(parse_list("--centers", g));
  const std::size_t q = coords.front().size();
  Matrix t(q, k);
  for (std::size_t j = 0; j < k; ++j) {
    if (coords[j].size() != q)
      throw Error(Errc::InvalidArgument, "--centers: every group needs the same number of coordinates");
    for (std::size_t r = 0; r < q; ++r) t(r, j) = coords[j][r];
  }
  return t;
}

void emit(const Globals& g, const std::string& text, std::ostream& out) {
  write_text(g.output, text, out);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json spectrum_json(const std::string& family, const std::vector<double>& props,
                   const std::vector<double>& rho) {
  return json{{"family", family}, {"proportions", props}, {"eigenvalues", rho},
              {"all_equal_one", theory::all_equal_one(rho)}};
}

std::string spectrum_csv(const std::vector<double>& rho) {
  std::ostringstream s;
  write_csv_row(s, {"index", "eigenvalue"});
  for (std::size_t i = 0; i < rho.size(); ++i) write_csv_row(s, {std::to_string(i + 1), format_number(rho[i])});
  return s.str();
}

// ---- ics -----------------------------------------------------------------

struct IcsArgs {
  std::string input;
  std::string pair = "cov-cov4";
  std::size_t d = 1;
  std::string scores;
};

std::string default_scores_path(const std::string& output) {
  if (output.empty() || output == "-") return "";
  std::filesystem::path p(output);
  p.replace_extension();
  return p.string() + "_scores.csv";
}

void cmd_ics(const Globals& g, const IcsArgs& a, std::ostream& out) {
  const CsvTable table = read_csv_file(a.input);
  const Matrix x = numeric_matrix(table);
  if (x.rows() < x.cols() + 1)
    throw Error(Errc::InvalidArgument, "need at least p + 1 = " + std::to_string(x.cols() + 1) +
                                           " data rows, found " + std::to_string(x.rows()));
  const ScatterPair pair = ScatterPair::parse(a.pair);
  CounterRng rng(g.seed, 0);
  const IcsResult fit = ics_fit(x, pair, rng);
  const Selection sel = select_med(fit.eigenvalues, a.d);

  const std::string format = resolved_format(g, "json");
  if (format == "json") {
    json j{{"pair", pair.name()},        {"eigenvalues", fit.eigenvalues},
           {"selected", sel.indices},    {"center", fit.center},
           {"d", a.d},                   {"n", x.rows()},
           {"p", x.cols()},              {"columns", table.header}};
    if (!sel.warning.empty()) j["warning"] = sel.warning;
    emit(g, dump(j), out);
  } else {
    std::ostringstream s;
    write_csv_row(s, {"index", "eigenvalue", "selected"});
    for (std::size_t i = 0; i < fit.eigenvalues.size(); ++i) {
      const bool chosen = std::find(sel.indices.begin(), sel.indices.end(), i + 1) != sel.indices.end();
      write_csv_row(s, {std::to_string(i + 1), format_number(fit.eigenvalues[i]), chosen ? "1" : "0"});
    }
    emit(g, s.str(), out);
  }

  const std::string scores_path = a.scores.empty() ? default_scores_path(g.output) : a.scores;
  if (!scores_path.empty()) {
    const Matrix z = transform(x, fit);
    std::ostringstream s;
    std::vector<std::string> header;
    for (std::size_t c = 0; c < z.cols(); ++c) header.push_back("IC" + std::to_string(c + 1));
    write_csv_row(s, header);
    for (std::size_t r = 0; r < z.rows(); ++r) {
      std::vector<std::string> cells;
      for (double v : z.row(r)) cells.push_back(format_number(v));
      write_csv_row(s, cells);
    }
    write_text(scores_path, s.str(), out);
  }
}

// ---- theory --------------------------------------------------------------

struct TheoryArgs {
  std::string props;
  std::string centers = "default";
  std::size_t p = 0;
  std::string alpha1_text;
  std::string alpha2_text;
  std::string t11_text;
  std::string t21_text;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double t11 = 0.0;
  double t21 = 0.0;

  void resolve() {
    if (!alpha1_text.empty()) alpha1 = parse_fraction("--alpha1", alpha1_text);
    if (!alpha2_text.empty()) alpha2 = parse_fraction("--alpha2", alpha2_text);
    if (!t11_text.empty()) t11 = parse_fraction("--t11", t11_text);
    if (!t21_text.empty()) t21 = parse_fraction("--t21", t21_text);
  }
  bool has_ratio = false;
};

void cmd_theory_dirac(const Globals& g, const TheoryArgs& a, std::ostream& out) {
  const auto props = parse_proportions(a.props);
  const Matrix centers = parse_centers(a.centers, props.size());
  const auto rho = theory::dirac_pop_ics(theory::MixtureSpec::dirac(props, centers));
  emit(g, resolved_format(g, "json") == "json" ? dump(spectrum_json("dirac", props, rho)) : spectrum_csv(rho), out);
}

void cmd_theory_gaussian(const Globals& g, const TheoryArgs& a, std::ostream& out) {
  const auto props = parse_proportions(a.props);
  const Matrix small = parse_centers(a.centers, props.size());
  const std::size_t q = small.rows();
  const std::size_t p = a.p == 0 ? q : a.p;
  if (p < q) throw Error(Errc::InvalidArgument, "--p must be at least the center dimension");
  Matrix centers(p, small.cols());
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < small.cols(); ++c) centers(r, c) = small(r, c);
  const auto rho = theory::gauss_pop_ics(theory::MixtureSpec::gaussian(props, centers, q));
  if (resolved_format(g, "json") == "json") {
    json j = spectrum_json("gaussian", props, rho);
    j["p"] = p;
    j["q"] = q;
    emit(g, dump(j), out);
  } else {
    emit(g, spectrum_csv(rho), out);
  }
}

void cmd_theory_two_group(const Globals& g, const TheoryArgs& a, std::ostream& out) {
  const double rho = theory::dirac_two_group_rho(a.alpha1);
  if (resolved_format(g, "json") == "json") {
    emit(g, dump(json{{"alpha1", a.alpha1}, {"alpha2", 1.0 - a.alpha1}, {"rho", rho}}), out);
  } else {
    std::ostringstream s;
    write_csv_row(s, {"alpha1", "rho"});
    write_csv_row(s, {format_number(a.alpha1), format_number(rho)});
    emit(g, s.str(), out);
  }
}

void cmd_theory_quartic(const Globals& g, const TheoryArgs& a, std::ostream& out) {
  const auto poly = theory::quartic_r(a.alpha1, a.alpha2);
  const auto roots = theory::quartic_real_roots_detailed(poly);
  if (resolved_format(g, "json") == "json") {
    json j{{"alpha1", a.alpha1}, {"alpha2", a.alpha2},
           {"coefficients", std::vector<double>(poly.c.begin(), poly.c.end())}};
    std::vector<double> values;
    std::vector<int> mult;
    for (const auto& r : roots) {
      values.push_back(r.value);
      mult.push_back(r.multiplicity);
    }
    j["roots"] = values;
    j["multiplicities"] = mult;
    j["admissible_ratios"] = theory::prop2_admissible_ratios(a.alpha1, a.alpha2);
    if (a.has_ratio) {
      const std::size_t p = a.p == 0 ? 4 : a.p;
      j["t11"] = a.t11;
      j["t21"] = a.t21;
      j["p"] = p;
      j["all_eigen_one"] = theory::prop2_all_eigen_one(a.alpha1, a.alpha2, a.t11, a.t21, p);
      j["eigenvalues"] =
          theory::gauss_pop_ics(theory::aligned_three_group(a.alpha1, a.alpha2, a.t11, a.t21, p));
    }
    emit(g, dump(j), out);
  } else {
    std::ostringstream s;
    write_csv_row(s, {"root", "multiplicity"});
    for (const auto& r : roots) write_csv_row(s, {format_number(r.value), std::to_string(r.multiplicity)});
    emit(g, s.str(), out);
  }
}

// ---- thresholds ----------------------------------------------------------

struct ThresholdArgs {
  std::size_t k = 0;
  std::size_t k_min = 2;
  std::size_t k_max = 10;
  std::string setups = "1,2,3";
  double step = 0.001;
  bool k_given = false;
  bool k_min_given = false;
  bool setups_given = false;
};

void cmd_thresholds(const Globals& g, ThresholdArgs a, std::ostream& out) {
  if (a.k_given) a.k_min = a.k_max = a.k;
  std::vector<int> setups;
  for (const auto& item : split(a.setups, ',')) {
    if (item != "1" && item != "2" && item != "3")
      throw UsageError("--setups takes a list drawn from 1, 2, 3");
    setups.push_back(item[0] - '0');
  }
  if (a.k_min < 2 || a.k_max < a.k_min) throw UsageError("need 2 <= k-min <= k-max");
  if (a.setups_given && (a.k_given || a.k_min_given) && a.k_min < 3)
    for (int id : setups)
      if (id != 1) throw UsageError("setup " + std::to_string(id) + " requires at least three groups");
  thresholds::validate({1, a.k_min, a.step});

  const auto rows = thresholds::threshold_table(a.k_min, a.k_max, setups, a.step);
  if (resolved_format(g, "csv") == "json") {
    json j = json::array();
    for (const auto& r : rows)
      j.push_back({{"k", r.k}, {"setup", r.setup}, {"threshold", r.threshold},
                   {"crossing_index", r.crossing_index}});
    emit(g, dump(j), out);
  } else {
    std::ostringstream s;
    write_csv_row(s, {"k", "setup", "threshold", "crossing_index"});
    for (const auto& r : rows)
      write_csv_row(s, {std::to_string(r.k), std::to_string(r.setup), format_number(r.threshold),
                        std::to_string(r.crossing_index)});
    emit(g, s.str(), out);
  }
}

// ---- ternary -------------------------------------------------------------

void cmd_ternary(const Globals& g, double step, const std::string& centers, std::ostream& out) {
  const Matrix t = centers.empty() || centers == "default" ? experiments::default_ternary_centers()
                                                           : parse_centers(centers, 3);
  const auto cells = experiments::ternary_grid(step, t);
  if (resolved_format(g, "csv") == "json") {
    json j = json::array();
    for (const auto& c : cells)
      j.push_back({{"alpha1", c.alpha1}, {"alpha2", c.alpha2}, {"alpha3", c.alpha3},
                   {"rho1", c.rho1}, {"rho2", c.rho2}, {"log_rho1", std::log(c.rho1)},
                   {"log_rho2", std::log(c.rho2)}, {"class", experiments::class_name(c.cls)}});
    emit(g, dump(j), out);
    return;
  }
  std::ostringstream s;
  write_csv_row(s, {"alpha1", "alpha2", "alpha3", "rho1", "rho2", "log_rho1", "log_rho2", "class"});
  for (const auto& c : cells)
    write_csv_row(s, {format_number(c.alpha1), format_number(c.alpha2), format_number(c.alpha3),
                      format_number(c.rho1), format_number(c.rho2), format_number(std::log(c.rho1)),
                      format_number(std::log(c.rho2)), experiments::class_name(c.cls)});
  emit(g, s.str(), out);
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string preset;
  std::string config;
  std::string pairs;
  std::size_t replications = 0;
  std::size_t threads = 0;
  bool list = false;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.list) {
    for (const auto& s : experiments::presets()) out << s.name << '\n';
    return 0;
  }
  if (a.preset.empty() == a.config.empty()) throw UsageError("give exactly one of --preset or --config");
  experiments::Scenario s = a.preset.empty()
                                ? experiments::parse_scenario_config(read_text_file(a.config))
                                : experiments::find_preset(a.preset);
  if (!a.pairs.empty()) {
    s.pairs.clear();
    if (a.pairs == "all") {
      s.pairs = experiments::all_pairs();
    } else {
      for (const auto& item : split(a.pairs, ',')) s.pairs.push_back(ScatterPair::parse(item));
    }
  }
  if (a.replications) s.replications = a.replications;
  if (g.seed_given) s.master_seed = g.seed;

  experiments::RunOptions options;
  options.threads = a.threads;
  const auto records = experiments::run_replications(s, options);
  const auto heat = experiments::aggregate_heatmap(records, s.k);

  const std::filesystem::path dir = g.output.empty() ? "." : g.output;
  std::filesystem::create_directories(dir);
  const bool as_json = resolved_format(g, "csv") == "json";

  std::ostringstream eig, sel;
  json jeig = json::array(), jsel = json::array();
  if (!as_json) write_csv_row(eig, {"scenario", "replicate", "pair", "index", "eigenvalue", "selected"});
  for (const auto& r : records) {
    if (!r.ok) continue;
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      const bool chosen = std::find(r.selected.begin(), r.selected.end(), i + 1) != r.selected.end();
      if (as_json) {
        jeig.push_back({{"scenario", r.scenario}, {"replicate", r.replicate}, {"pair", r.pair},
                        {"index", i + 1}, {"eigenvalue", r.eigenvalues[i]}, {"selected", chosen}});
      } else {
        write_csv_row(eig, {r.scenario, std::to_string(r.replicate), r.pair, std::to_string(i + 1),
                            format_number(r.eigenvalues[i]), chosen ? "1" : "0"});
      }
    }
  }
  if (!as_json) write_csv_row(sel, {"scenario", "pair", "ic", "percent", "successful"});
  for (const auto& c : heat) {
    if (as_json) {
      jsel.push_back({{"scenario", c.scenario}, {"pair", c.pair}, {"ic", c.ic},
                      {"percent", c.percent}, {"successful", c.successful}});
    } else {
      write_csv_row(sel, {c.scenario, c.pair, std::to_string(c.ic), format_number(c.percent),
                          std::to_string(c.successful)});
    }
  }
  const std::string ext = as_json ? ".json" : ".csv";
  write_text((dir / ("eigenvalues" + ext)).string(), as_json ? dump(jeig) : eig.str(), out);
  write_text((dir / ("selection" + ext)).string(), as_json ? dump(jsel) : sel.str(), out);

  int failures = 0;
  for (const auto& r : records) {
    if (r.ok) continue;
    ++failures;
    err << "error: replicate " << r.replicate << ", pair " << r.pair << ": " << r.error << '\n';
  }
  return failures == 0 ? 0 : 1;
}

// ---- profile -------------------------------------------------------------

void cmd_profile(const Globals& g, const std::string& grid, experiments::ProfileOptions options,
                 std::ostream& out) {
  if (g.seed_given) options.seed = g.seed;
  const auto rows = experiments::eigen_profile(grid, options);
  if (resolved_format(g, "csv") == "json") {
    json j = json::array();
    for (const auto& r : rows)
      j.push_back({{"panel", r.panel}, {"scenario", r.scenario}, {"unit", r.unit},
                   {"index", r.index}, {"value", r.value}});
    emit(g, dump(j), out);
    return;
  }
  std::ostringstream s;
  write_csv_row(s, {"panel", "scenario", "unit", "index", "value"});
  for (const auto& r : rows)
    write_csv_row(s, {r.panel, r.scenario, std::to_string(r.unit), std::to_string(r.index), format_number(r.value)});
  emit(g, s.str(), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invariant coordinate selection: estimators, population spectra and simulations"};
  app.name("ics");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--output,-o", g.output, "Output file (directory for simulate); stdout when omitted");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->each([&g](const std::string&) { g.format_given = true; });
  app.add_option("--seed", g.seed, "Master seed")->each([&g](const std::string&) { g.seed_given = true; });

  IcsArgs ics_args;
  auto* ics = app.add_subcommand("ics", "Fit ICS to a numeric CSV and select components with med");
  ics->add_option("--input,-i", ics_args.input, "CSV with a header row")->required();
  ics->add_option("--pair", ics_args.pair, "Scatter pair <v1>-<v2>")->capture_default_str();
  ics->add_option("--d", ics_args.d, "Number of components to select")->capture_default_str();
  ics->add_option("--scores", ics_args.scores, "Scores CSV (default: <output>_scores.csv)");

  TheoryArgs th;
  auto* theory = app.add_subcommand("theory", "Population spectra and the quartic criterion");
  theory->require_subcommand(1);
  auto* dirac = theory->add_subcommand("dirac", "Dirac mixture spectrum");
  dirac->add_option("--props", th.props, "Group proportions a,b,...")->required();
  dirac->add_option("--centers", th.centers, "'default' or x,y;x,y;... one group per ';'")->capture_default_str();
  auto* gaussian = theory->add_subcommand("gaussian", "Gaussian mixture spectrum (unit within-group covariance)");
  gaussian->add_option("--props", th.props, "Group proportions a,b,...")->required();
  gaussian->add_option("--centers", th.centers, "'default' or x,y;x,y;... one group per ';'")->capture_default_str();
  gaussian->add_option("--p", th.p, "Ambient dimension (default: center dimension)");
  auto* two = theory->add_subcommand("two-group", "Closed-form two-group Dirac eigenvalue");
  two->add_option("--alpha1", th.alpha1_text, "Proportion of the first group (decimal or a/b)")->required();
  auto* quartic = theory->add_subcommand("quartic", "Quartic r(x) of the aligned three-group model");
  quartic->add_option("--alpha1", th.alpha1_text, "Decimal or a/b")->required();
  quartic->add_option("--alpha2", th.alpha2_text, "Decimal or a/b")->required();
  auto* t11 = quartic->add_option("--t11", th.t11_text, "First center (with --t21: test the ratio)");
  auto* t21 = quartic->add_option("--t21", th.t21_text, "Second center");
  t11->needs(t21);
  t21->needs(t11);
  quartic->add_option("--p", th.p, "Dimension for the ratio test (default 4)");

  ThresholdArgs ta;
  auto* thr = app.add_subcommand("thresholds", "Proportion thresholds by grid search");
  thr->add_option("--k", ta.k, "Single group count")->check(CLI::PositiveNumber)->each([&ta](const std::string&) {
    ta.k_given = true;
  });
  thr->add_option("--k-min", ta.k_min)->capture_default_str()->each([&ta](const std::string&) {
    ta.k_min_given = true;
  });
  thr->add_option("--k-max", ta.k_max)->capture_default_str();
  thr->add_option("--setups", ta.setups, "Comma list of setups")->capture_default_str()->each(
      [&ta](const std::string&) { ta.setups_given = true; });
  thr->add_option("--step", ta.step, "Grid step")->capture_default_str();

  double tern_step = 0.001;
  std::string tern_centers = "default";
  auto* tern = app.add_subcommand("ternary", "Three-group eigenvalue map over the simplex");
  tern->add_option("--step", tern_step, "Grid step")->capture_default_str();
  tern->add_option("--centers", tern_centers, "'default' or x,y;x,y;x,y")->capture_default_str();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo replications of a scenario");
  auto* preset = sim->add_option("--preset", sa.preset, "Registered scenario name");
  auto* config = sim->add_option("--config", sa.config, "key = value scenario file");
  preset->excludes(config);
  sim->add_option("--pairs", sa.pairs, "Override pairs: comma list or 'all'");
  sim->add_option("--replications", sa.replications, "Override replicate count");
  sim->add_option("--threads", sa.threads, "Worker threads (0: all cores)");
  sim->add_flag("--list-presets", sa.list, "Print preset names and exit");

  std::string grid;
  experiments::ProfileOptions po;
  auto* prof = app.add_subcommand("profile", "Long-format eigenvalue tables over scenario grids");
  prof->add_option("--grid", grid, "One of: gaussian-population, dirac-full-rank, dirac-reduced-rank, sampled-delta")
      ->required();
  prof->add_option("--configurations", po.configurations, "Center configurations per scenario")->capture_default_str();
  prof->add_option("--replications", po.replications, "Replicates for sampled grids")->capture_default_str();
  prof->add_option("--threads", po.threads, "Worker threads (0: all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other parse failure is a usage error.
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    th.resolve();
    if (ics->parsed()) cmd_ics(g, ics_args, out);
    else if (dirac->parsed()) cmd_theory_dirac(g, th, out);
    else if (gaussian->parsed()) cmd_theory_gaussian(g, th, out);
    else if (two->parsed()) cmd_theory_two_group(g, th, out);
    else if (quartic->parsed()) {
      th.has_ratio = t11->count() > 0;
      cmd_theory_quartic(g, th, out);
    } else if (thr->parsed()) cmd_thresholds(g, ta, out);
    else if (tern->parsed()) cmd_ternary(g, tern_step, tern_centers, out);
    else if (sim->parsed()) return cmd_simulate(g, sa, out, err);
    else if (prof->parsed()) cmd_profile(g, grid, po, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ics::cli
