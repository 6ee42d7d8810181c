#pragma once

// Command-line front end. Subcommands:
//
//   stable  deterministic alpha-stable samples        (realisation, value)
//   levy    Lévy paths on a time grid                 (realisation, t, W)
//   sde     fast-slow or Euler-Maruyama SDE paths     (realisation, t, Z)
//   density histogram / smoothed density of a column  (bin_center, density[, flagged]) or (x, density)
//   acf     normalised autocorrelation of a column    (lag, C)
//   ks      two-sample Kolmogorov-Smirnov distance    (ks)
//   map     graph of the map                          (x, Tx)
//   orbit   one orbit of the map                      (n, x)
//
// Every generator run writes <out>.manifest.json beside its CSV. A flat
// key=value file passed with --config supplies defaults; flags on the command
// line override it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stablemap/baseline.hpp"
#include "stablemap/fastslow.hpp"
#include "stablemap/harness.hpp"
#include "stablemap/io.hpp"
#include "stablemap/levy.hpp"
#include "stablemap/manifest.hpp"
#include "stablemap/stable.hpp"
#include "stablemap/stats.hpp"

namespace stablemap::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_unexpected = 1,
  exit_validation = 2,
  exit_all_failed = 3,
  exit_io = 4,
  exit_schema = 5,
};

inline constexpr const char* output_dir_env = "STABLEMAP_OUTPUT_DIR";

/// "lo:hi:k" -> k+1 equispaced points; otherwise a comma-separated list.
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw invalid_parameter("bad number '" + s + "' in grid '" + text + "'");
    }
  };
  if (sep == ':') {
    if (parts.size() != 3) throw invalid_parameter("grid '" + text + "' must look like lo:hi:count");
    const double count = number(parts[2]);
    if (!(count >= 1.0) || count != std::floor(count))
      throw invalid_parameter("grid count must be a positive integer");
    return uniform_grid(number(parts[0]), number(parts[1]), static_cast<std::size_t>(count));
  }
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(number(p));
  if (out.empty()) throw invalid_parameter("empty grid");
  return out;
}

inline std::pair<double, double> parse_range(const std::string& text) {
  const auto g = parse_grid(text.find(':') != std::string::npos ? text + ":1" : text);
  if (g.size() != 2) throw invalid_parameter("range must look like lo:hi");
  return {g.front(), g.back()};
}

inline std::string resolve_output(const std::string& out, const std::string& fallback) {
  std::filesystem::path p = out.empty() ? std::filesystem::path(fallback) : std::filesystem::path(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(output_dir_env); dir != nullptr && *dir != '\0')
      p = std::filesystem::path(dir) / p;
  }
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p.string();
}

/// Read a flat key=value file into --key=value tokens. Blank lines and lines
/// starting with '#' or ';' are ignored; surrounding quotes are stripped.
inline std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::io_error("cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw invalid_parameter("config line '" + line + "' is not key=value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

struct GeneratorFlags {
  std::uint64_t realisations = 1000;
  std::uint64_t seed = 0;
  unsigned width = 0;
  std::string out;
};

inline void add_generator_flags(CLI::App* sub, GeneratorFlags& g) {
  sub->add_option("--realisations,-R", g.realisations, "number of independent realisations")
      ->capture_default_str();
  sub->add_option("--seed", g.seed, "master seed")->capture_default_str();
  sub->add_option("--width", g.width, "worker threads (0: all cores)")->capture_default_str();
  sub->add_option("--out,-o", g.out, "output CSV (relative paths resolve against $" +
                                         std::string(output_dir_env) + ")");
}

class Cli {
public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args);

private:
  std::ostream& out_;
  std::ostream& err_;

  // stable / levy
  double alpha_ = 1.6, eta_ = 1.0, beta_ = 0.0;
  std::uint64_t n_ = 0;
  std::uint64_t guard_ = default_iteration_guard;
  std::string grid_ = "0:1:1000";
  GeneratorFlags gen_;

  // sde
  std::string method_ = "homog", example_ = "example1", eps_ = "1e-3", record_, x0_ = "invariant";
  std::optional<double> sde_alpha_, sde_eta_, sde_beta_, xi_;
  double dt_ = 1e-4, horizon_ = 1.0;
  bool no_perturb_ = false, no_taming_ = false;
  std::uint64_t burn_ = default_burn_in;

  // post-processing
  std::string in_, in_b_, column_, range_, flag_;
  std::optional<double> time_filter_;
  std::optional<std::uint64_t> realisation_filter_;
  std::size_t bins_ = 0, points_ = 0, max_lag_ = 100;
  bool smooth_ = false;

  // map / orbit
  double gamma_ = 0.625, x_start_ = 0.3;
  std::uint64_t steps_ = 1000, map_points_ = 1000;

  int cmd_stable(CLI::App* sub);
  int cmd_levy(CLI::App* sub);
  int cmd_sde(CLI::App* sub);
  int cmd_density();
  int cmd_acf();
  int cmd_ks();
  int cmd_map();
  int cmd_orbit();

  template <class T>
  void finish_run(const RunResult<T>& result, RunSpec spec, const std::string& path, CLI::App* sub,
                  const nlohmann::json& extra = nlohmann::json::object());

  std::vector<double> load_column(const std::string& path, std::optional<std::uint64_t> realisation,
                                  std::vector<double>* times = nullptr) const;
};

template <class T>
void Cli::finish_run(const RunResult<T>& result, RunSpec spec, const std::string& path, CLI::App* sub,
                     const nlohmann::json& extra) {
  spec.outputs.push_back(path);
  nlohmann::json more = extra;
  more["config"] = sub->config_to_str(true, false);
  more["succeeded"] = result.values.size() - result.failures.total();
  write_manifest(manifest_path_for(path), make_manifest(spec, result.failures, more));
  if (result.failures.total() > 0)
    err_ << "warning: " << result.failures.total() << " of " << result.values.size()
         << " realisations failed (guard " << result.failures.guard_exceeded << ", diverged "
         << result.failures.diverged << ", singularity " << result.failures.singularity << ")\n";
}

inline int Cli::cmd_stable(CLI::App* sub) {
  const StableParams sp(alpha_, eta_, beta_);
  const std::uint64_t n = n_ > 0 ? n_ : default_sum_length(alpha_, beta_);
  if (alpha_ < 1.0 && std::abs(beta_) == 1.0)
    err_ << "warning: alpha < 1 with |beta| = 1 needs on the order of 1e7 map iterations per "
            "realisation (guard " << guard_ << ")\n";
  const RunOptions opts{gen_.realisations, gen_.seed, gen_.width};
  GeneratorOptions g;
  g.max_iter_guard = guard_;
  const auto result = stablemap::run(opts, [&](std::uint64_t, RealisationStreams& s) {
    return stable_sample(n, sp, s, g);
  });
  const std::string path = resolve_output(gen_.out, "stable.csv");
  io::CsvWriter csv(path, "stable", {"realisation", "value"});
  for (std::size_t i = 0; i < result.values.size(); ++i)
    if (result.values[i]) csv.row({static_cast<double>(i), *result.values[i]});
  csv.close();
  RunSpec spec{"stable", {{"alpha", alpha_}, {"eta", eta_}, {"beta", beta_}, {"n", n}, {"guard", guard_}},
               opts, {}};
  finish_run(result, spec, path, sub);
  return exit_ok;
}

inline int Cli::cmd_levy(CLI::App* sub) {
  const StableParams sp(alpha_, eta_, beta_);
  const std::uint64_t n = n_ > 0 ? n_ : default_sum_length(alpha_, beta_);
  const std::vector<double> grid = parse_grid(grid_);
  check_grid(grid, grid.back());
  const RunOptions opts{gen_.realisations, gen_.seed, gen_.width};
  GeneratorOptions g;
  g.max_iter_guard = guard_;
  const auto result = stablemap::run(opts, [&](std::uint64_t, RealisationStreams& s) {
    return levy_path(n, sp, grid, s, g);
  });
  const std::string path = resolve_output(gen_.out, "levy.csv");
  io::CsvWriter csv(path, "levy", {"realisation", "t", "W"});
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    if (!result.values[i]) continue;
    const SamplePath& p = *result.values[i];
    for (std::size_t k = 0; k < p.size(); ++k) csv.row({static_cast<double>(i), p.times[k], p.values[k]});
  }
  csv.close();
  RunSpec spec{"levy",
               {{"alpha", alpha_}, {"eta", eta_}, {"beta", beta_}, {"n", n}, {"grid", grid_}, {"guard", guard_}},
               opts, {}};
  finish_run(result, spec, path, sub);
  return exit_ok;
}

inline std::string eps_suffix(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_eps%g", eps);
  return buf;
}

inline int Cli::cmd_sde(CLI::App* sub) {
  const bool is_ex1 = example_ == "example1";
  if (!is_ex1 && example_ != "example2")
    throw invalid_parameter("--example must be example1 or example2");
  const StableParams defaults = is_ex1 ? Example1::default_noise() : Example2::default_noise();
  const StableParams sp(sde_alpha_.value_or(defaults.alpha), sde_eta_.value_or(defaults.eta),
                        sde_beta_.value_or(defaults.beta));
  const double xi = xi_.value_or(is_ex1 ? Example1::default_xi : Example2::default_xi);
  const std::vector<double> record = record_.empty() ? std::vector<double>{horizon_} : parse_grid(record_);
  const RunOptions opts{gen_.realisations, gen_.seed, gen_.width};
  const std::string base = resolve_output(gen_.out, "sde.csv");

  auto write_paths = [&](const auto& result, const std::string& path) {
    io::CsvWriter csv(path, "sde", {"realisation", "t", "Z"});
    for (std::size_t i = 0; i < result.values.size(); ++i) {
      if (!result.values[i]) continue;
      const SamplePath& p = *result.values[i];
      for (std::size_t k = 0; k < p.size(); ++k) csv.row({static_cast<double>(i), p.times[k], p.values[k]});
    }
    csv.close();
  };
  const nlohmann::json noise = {{"alpha", sp.alpha}, {"eta", sp.eta}, {"beta", sp.beta}};

  if (method_ == "em") {
    EMConfig cfg;
    cfg.dt = dt_;
    cfg.xi = xi;
    cfg.sp = sp;
    cfg.horizon = horizon_;
    cfg.record_times = record;
    cfg.taming = !no_taming_;
    cfg.validate();
    const auto result = stablemap::run(opts, [&](std::uint64_t, RealisationStreams& s) {
      return is_ex1 ? em_solve_example1(cfg, s.noise) : em_solve_example2(cfg, s.noise);
    });
    RunResult<SamplePath> paths;
    std::uint64_t crossings = 0, crossed = 0, floor_hits = 0;
    for (const auto& v : result.values) {
      if (v) {
        crossings += v->boundary_crossings;
        crossed += v->boundary_crossings > 0 ? 1 : 0;
        floor_hits += v->drift_floor_hits;
        paths.values.emplace_back(v->path);
      } else {
        paths.values.emplace_back(std::nullopt);
      }
    }
    paths.failures = result.failures;
    write_paths(paths, base);
    RunSpec spec{"sde-em",
                 {{"example", example_}, {"dt", dt_}, {"xi", xi}, {"t", horizon_}, {"noise", noise},
                  {"taming", !no_taming_}, {"record", record_.empty() ? std::to_string(horizon_) : record_}},
                 opts, {}};
    finish_run(paths, spec, base, sub,
               {{"boundary_crossings", crossings}, {"realisations_crossing", crossed},
                {"drift_floor_hits", floor_hits}});
    return exit_ok;
  }
  if (method_ != "homog") throw invalid_parameter("--method must be homog or em");
  if (!(sp.alpha > 1.0 && sp.alpha < 2.0))
    throw invalid_parameter("--method homog requires alpha in (1,2)");
  if (x0_ != "invariant" && x0_ != "lebesgue") throw invalid_parameter("--x0 must be invariant or lebesgue");

  const std::vector<double> eps_values = parse_grid(eps_);
  for (const double eps : eps_values) {
    FastSlowConfig cfg;
    cfg.eps = eps;
    cfg.xi = xi;
    cfg.sp = sp;
    cfg.horizon = horizon_;
    cfg.record_times = record;
    cfg.perturbation = no_perturb_ ? PerturbationPolicy::off() : PerturbationPolicy::on();
    cfg.initial = x0_ == "invariant" ? InitialMeasure::invariant : InitialMeasure::lebesgue;
    cfg.burn_in = burn_;
    cfg.validate();
    const auto result = stablemap::run(opts, [&](std::uint64_t, RealisationStreams& s) {
      return is_ex1 ? solve_sde(cfg, Example1{}, s) : solve_sde(cfg, Example2{}, s);
    });
    std::string path = base;
    if (eps_values.size() > 1) {
      const std::string ext = ".csv";
      const bool has_ext = path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
      path = (has_ext ? path.substr(0, path.size() - ext.size()) : path) + eps_suffix(eps) + ".csv";
    }
    write_paths(result, path);
    RunSpec spec{"sde-homog",
                 {{"example", example_}, {"eps", eps}, {"xi", xi}, {"t", horizon_}, {"noise", noise},
                  {"perturbation", !no_perturb_}, {"x0", x0_}, {"burn", burn_},
                  {"record", record_.empty() ? std::to_string(horizon_) : record_}},
                 opts, {}};
    const std::vector<double> spurious =
        is_ex1 ? spurious_fixed_points(Example1{}, eps, sp, -Example1{}.B, Example1{}.B, 100000)
               : example2_spurious_fixed_points(eps, sp);
    finish_run(result, spec, path, sub, {{"spurious_fixed_points", spurious}});
  }
  return exit_ok;
}

inline std::vector<double> Cli::load_column(const std::string& path, std::optional<std::uint64_t> realisation,
                                            std::vector<double>* times) const {
  const io::CsvTable table = io::read_csv(path);
  if (table.columns.empty()) throw io::schema_error("'" + path + "' has no columns");
  const std::string col = column_.empty() ? table.columns.back() : column_;
  const std::size_t k = table.column_index(col);
  std::optional<std::size_t> t_col, r_col;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i] == "t") t_col = i;
    if (table.columns[i] == "realisation") r_col = i;
  }
  if (time_filter_ && !t_col) throw io::schema_error("--time given but '" + path + "' has no t column");
  if (realisation && !r_col) realisation.reset();
  std::vector<double> out;
  for (const auto& row : table.rows) {
    if (time_filter_ && std::abs(row[*t_col] - *time_filter_) > 1e-12 * std::max(1.0, std::abs(*time_filter_)))
      continue;
    if (realisation && row[*r_col] != static_cast<double>(*realisation)) continue;
    out.push_back(row[k]);
    if (times != nullptr && t_col) times->push_back(row[*t_col]);
  }
  if (out.empty()) throw io::schema_error("no rows selected from '" + path + "'");
  return out;
}

inline int Cli::cmd_density() {
  const std::vector<double> xs = load_column(in_, realisation_filter_);
  stats::HistogramOptions h;
  h.bins = bins_;
  if (!range_.empty()) h.range = parse_range(range_);
  const std::string path = resolve_output(gen_.out, "density.csv");
  if (smooth_) {
    const auto est = stats::histogram(xs, h);
    const auto curve = stats::smoothed_density(est, points_ > 0 ? points_ : 4 * est.bins());
    io::CsvWriter csv(path, "density-smooth", {"x", "density"});
    for (const auto& [x, y] : curve) csv.row({x, y});
    csv.close();
    return exit_ok;
  }
  stats::StationaryDensityOptions opts;
  opts.histogram = h;
  if (!flag_.empty()) opts.flagged_points = parse_grid(flag_);
  const auto sd = stats::stationary_density([&] { return stats::LongRun{xs, false}; }, opts);
  std::vector<std::string> cols{"bin_center", "density"};
  if (!flag_.empty()) cols.push_back("flagged");
  io::CsvWriter csv(path, "density", cols);
  for (std::size_t i = 0; i < sd.estimate.bins(); ++i) {
    std::vector<double> row{sd.estimate.center(i), sd.estimate.density(i)};
    if (!flag_.empty()) row.push_back(sd.flagged[i] ? 1.0 : 0.0);
    csv.row(row);
  }
  csv.close();
  return exit_ok;
}

inline int Cli::cmd_acf() {
  std::vector<double> times;
  const std::vector<double> xs = load_column(in_, realisation_filter_.value_or(0), &times);
  const double spacing = times.size() >= 2 ? times[1] - times[0] : 1.0;
  const auto c = stats::acf(xs, max_lag_);
  const std::string path = resolve_output(gen_.out, "acf.csv");
  io::CsvWriter csv(path, "acf", {"lag", "C"});
  for (std::size_t k = 0; k < c.size(); ++k) csv.row({spacing * static_cast<double>(k), c[k]});
  csv.close();
  return exit_ok;
}

inline int Cli::cmd_ks() {
  const std::vector<double> a = load_column(in_, realisation_filter_);
  const std::vector<double> b = load_column(in_b_, realisation_filter_);
  const double d = stats::ks_distance(a, b);
  out_ << "ks=" << io::format_double(d) << '\n';
  if (!gen_.out.empty()) {
    io::CsvWriter csv(resolve_output(gen_.out, "ks.csv"), "ks", {"ks"});
    csv.row({d});
    csv.close();
  }
  return exit_ok;
}

inline int Cli::cmd_map() {
  const ThalerParams p = ThalerParams::from_gamma(gamma_);
  const std::string path = resolve_output(gen_.out, "map.csv");
  io::CsvWriter csv(path, "map", {"x", "Tx"});
  for (const double x : uniform_grid(0.0, 1.0, map_points_)) csv.row({x, thaler_step(x, p)});
  csv.close();
  return exit_ok;
}

inline int Cli::cmd_orbit() {
  const ThalerParams p = ThalerParams::from_gamma(gamma_);
  if (!(x_start_ >= 0.0 && x_start_ <= 1.0)) throw invalid_parameter("--x0 must lie in [0, 1]");
  const std::string path = resolve_output(gen_.out, "orbit.csv");
  io::CsvWriter csv(path, "orbit", {"n", "x"});
  double x = x_start_;
  for (std::uint64_t n = 0; n <= steps_; ++n) {
    csv.row({static_cast<double>(n), x});
    x = thaler_step(x, p);
  }
  csv.close();
  return exit_ok;
}

inline int Cli::run(std::vector<std::string> args) {
  CLI::App app{"Deterministic simulation of alpha-stable laws, Lévy processes and Marcus SDEs"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* stable = app.add_subcommand("stable", "alpha-stable samples from return times");
  auto* levy = app.add_subcommand("levy", "alpha-stable Lévy paths");
  auto* sde = app.add_subcommand("sde", "scalar Marcus SDE paths");
  auto* density = app.add_subcommand("density", "histogram density of a CSV column");
  auto* acf = app.add_subcommand("acf", "normalised autocorrelation of a CSV column");
  auto* ks = app.add_subcommand("ks", "two-sample Kolmogorov-Smirnov distance");
  auto* map = app.add_subcommand("map", "graph of the map");
  auto* orbit = app.add_subcommand("orbit", "orbit of the map");

  for (auto* sub : {stable, levy}) {
    sub->add_option("--alpha", alpha_, "stability index in (0,1) or (1,2)")->capture_default_str();
    sub->add_option("--eta", eta_, "scale > 0")->capture_default_str();
    sub->add_option("--beta", beta_, "skewness in [-1,1]")->capture_default_str();
    sub->add_option("--n", n_, "return times per unit time (0: 1e4, or 5e4 for alpha<1, |beta|=1)")
        ->capture_default_str();
    sub->add_option("--guard", guard_, "map iterations allowed per realisation")->capture_default_str();
    add_generator_flags(sub, gen_);
  }
  levy->add_option("--grid", grid_, "time grid lo:hi:count or comma list")->capture_default_str();

  sde->add_option("--method", method_, "homog or em")->capture_default_str();
  sde->add_option("--example", example_, "example1 or example2")->capture_default_str();
  sde->add_option("--eps", eps_, "scale separation; a comma list runs a sweep")->capture_default_str();
  sde->add_option("--dt", dt_, "Euler-Maruyama time step")->capture_default_str();
  sde->add_option("--xi", xi_, "initial condition (default per example)");
  sde->add_option("--t", horizon_, "final time")->capture_default_str();
  sde->add_option("--record", record_, "record times lo:hi:count or comma list (default: final time)");
  sde->add_option("--alpha", sde_alpha_, "noise stability index (default per example)");
  sde->add_option("--eta", sde_eta_, "noise scale (default per example)");
  sde->add_option("--beta", sde_beta_, "noise skewness (default per example)");
  sde->add_option("--x0", x0_, "fast initial measure: invariant (burn-in) or lebesgue")->capture_default_str();
  sde->add_option("--burn", burn_, "burn-in iterations for --x0 invariant")->capture_default_str();
  sde->add_flag("--no-perturb", no_perturb_, "disable anti-trapping kicks");
  sde->add_flag("--no-taming", no_taming_, "plain Euler-Maruyama drift");
  add_generator_flags(sde, gen_);

  for (auto* sub : {density, acf, ks}) {
    sub->add_option("--column", column_, "column to read (default: last)");
    sub->add_option("--time", time_filter_, "keep only rows with this t");
    sub->add_option("--out,-o", gen_.out, "output CSV");
  }
  density->add_option("--in", in_, "input CSV")->required();
  density->add_option("--realisation", realisation_filter_, "keep only this realisation");
  density->add_option("--bins", bins_, "bin count (0: ceil(2 N^(1/3)))")->capture_default_str();
  density->add_option("--range", range_, "histogram range lo:hi");
  density->add_flag("--smooth", smooth_, "emit the monotone-cubic smoothed density");
  density->add_option("--points", points_, "points on the smoothed curve (0: 4 x bins)");
  density->add_option("--flag", flag_, "comma list of points whose bins are flagged");
  acf->add_option("--in", in_, "input CSV")->required();
  acf->add_option("--realisation", realisation_filter_, "realisation to use (default 0)");
  acf->add_option("--max-lag", max_lag_, "maximum lag in samples")->capture_default_str();
  ks->add_option("--a", in_, "first CSV")->required();
  ks->add_option("--b", in_b_, "second CSV")->required();
  ks->add_option("--realisation", realisation_filter_, "keep only this realisation");

  map->add_option("--gamma", gamma_, "map exponent")->capture_default_str();
  map->add_option("--points", map_points_, "grid intervals on [0,1]")->capture_default_str();
  map->add_option("--out,-o", gen_.out, "output CSV");
  orbit->add_option("--gamma", gamma_, "map exponent")->capture_default_str();
  orbit->add_option("--x0", x_start_, "initial point")->capture_default_str();
  orbit->add_option("--steps", steps_, "number of steps")->capture_default_str();
  orbit->add_option("--out,-o", gen_.out, "output CSV");

  try {
    // --config FILE expands to --key=value tokens placed right after the
    // subcommand, so explicit flags (parsed later) win.
    std::vector<std::string> expanded;
    std::vector<std::string> config_args;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_args = config_tokens(args[++i]);
      } else if (args[i].rfind("--config=", 0) == 0) {
        config_args = config_tokens(args[i].substr(9));
      } else {
        expanded.push_back(args[i]);
      }
    }
    if (!config_args.empty() && !expanded.empty())
      expanded.insert(expanded.begin() + 1, config_args.begin(), config_args.end());
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);

    if (stable->parsed()) return cmd_stable(stable);
    if (levy->parsed()) return cmd_levy(levy);
    if (sde->parsed()) return cmd_sde(sde);
    if (density->parsed()) return cmd_density();
    if (acf->parsed()) return cmd_acf();
    if (ks->parsed()) return cmd_ks();
    if (map->parsed()) return cmd_map();
    if (orbit->parsed()) return cmd_orbit();
    return exit_validation;
  } catch (const CLI::CallForHelp& e) {
    out_ << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const invalid_parameter& e) {
    err_ << "error: invalid parameter: " << e.what() << '\n';
    return exit_validation;
  } catch (const run_error& e) {
    err_ << "error: " << e.what() << " (guard " << e.counts().guard_exceeded << ", diverged "
         << e.counts().diverged << ", singularity " << e.counts().singularity << ")\n";
    return exit_all_failed;
  } catch (const io::schema_error& e) {
    err_ << "error: schema: " << e.what() << '\n';
    return exit_schema;
  } catch (const io::io_error& e) {
    err_ << "error: io: " << e.what() << '\n';
    return exit_io;
  } catch (const std::filesystem::filesystem_error& e) {
    err_ << "error: io: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return exit_unexpected;
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Cli(out, err).run(std::move(args));
}

}  // namespace stablemap::cli
