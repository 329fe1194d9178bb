// favar: sign-restricted proxy FAVAR estimation and analysis
//
// Subcommands: simulate, prepare-data, build-instrument, estimate, irf,
// report. Configuration comes from an INI-style file with sections that
// mirror the module layout; command-line flags override file values.
// Exit codes: 0 success, 2 validation, 3 numerical failure, 4 I/O.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "favar/analysis.hpp"
#include "favar/csv.hpp"
#include "favar/dgp.hpp"
#include "favar/draws_io.hpp"
#include "favar/gibbs.hpp"
#include "favar/init.hpp"
#include "favar/instrument.hpp"
#include "favar/model.hpp"
#include "favar/pipeline.hpp"
#include "favar/validate.hpp"

namespace fs = std::filesystem;
using namespace favar;

namespace {

// ---------------------------------------------------------------------- //
// configuration file
// ---------------------------------------------------------------------- //

struct ConfigFile {
  // section -> key -> (value, line number)
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>> values;
  std::string path;

  bool has(const std::string& section, const std::string& key) const {
    auto s = values.find(section);
    return s != values.end() && s->second.count(key) > 0;
  }
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const {
    auto s = values.find(section);
    if (s == values.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second.first;
  }
  int line_of(const std::string& section, const std::string& key) const {
    return values.at(section).at(key).second;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    try {
      size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError,
                  path + ":" + std::to_string(line_of(section, key)) +
                      ": '" + v + "' is not a number");
    }
  }
  int get_int(const std::string& section, const std::string& key,
              int fallback) const {
    const double x = get_double(section, key, fallback);
    return static_cast<int>(x);
  }
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCode::ConfigError,
                path + ":" + std::to_string(line_of(section, key)) + ": '" +
                    v + "' is not a boolean");
  }
};

std::string trimmed(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

ConfigFile parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  ConfigFile cfg;
  cfg.path = path;
  std::string line, section = "global";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorCode::ConfigError,
                    path + ":" + std::to_string(lineno) + ": unterminated section");
      section = trimmed(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError,
                  path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    cfg.values[section][key] = {value, lineno};
  }
  return cfg;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------- //
// model assembly from config
// ---------------------------------------------------------------------- //

ModelSpec spec_from_config(const ConfigFile& cfg) {
  ModelSpec spec;
  spec.n_countries = cfg.get_int("model", "n_countries", 0);
  for (const std::string& name : split_list(cfg.get("model", "z_names", "")))
    spec.var_names_z.push_back(name);
  spec.factor_lag_order = cfg.get_int("model", "factor_lag_order", 0);
  spec.var_lag_order = cfg.get_int("model", "var_lag_order", 6);
  spec.include_country_channels =
      cfg.get_bool("model", "include_country_channels", false);
  spec.policy_rate_index = cfg.get_int("model", "policy_rate_index", 0);
  spec.instrument_count = cfg.get_int("model", "instrument_count", 1);
  spec.mcmc.total_iterations = cfg.get_int("mcmc", "total_iterations", 18000);
  spec.mcmc.burn_in = cfg.get_int("mcmc", "burn_in", 3000);
  spec.mcmc.thinning = cfg.get_int("mcmc", "thinning", 5);

  const std::string restrictions = cfg.get("model", "sign_restrictions", "");
  for (const std::string& item : split_list(restrictions)) {
    const size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::ConfigError,
                  cfg.path + ":" +
                      std::to_string(cfg.line_of("model", "sign_restrictions")) +
                      ": expected <variable>:<+|-> entries");
    SignRestriction sr;
    sr.variable = std::stoi(item.substr(0, colon));
    const std::string sign = trimmed(item.substr(colon + 1));
    if (sign == "+") sr.sign = +1;
    else if (sign == "-") sr.sign = -1;
    else
      throw Error(ErrorCode::ConfigError,
                  cfg.path + ":" +
                      std::to_string(cfg.line_of("model", "sign_restrictions")) +
                      ": sign must be + or -");
    spec.sign_restrictions.push_back(sr);
  }
  return spec;
}

PriorConfig priors_from_config(const ConfigFile& cfg) {
  PriorConfig p;
  p.loading_variance = cfg.get_double("priors", "loading_variance", p.loading_variance);
  p.z_loading_variance =
      cfg.get_double("priors", "z_loading_variance", p.z_loading_variance);
  p.impact_variance = cfg.get_double("priors", "impact_variance", p.impact_variance);
  p.proxy_relevance_variance = cfg.get_double("priors", "proxy_relevance_variance",
                                              p.proxy_relevance_variance);
  p.proxy_noise_variance =
      cfg.get_double("priors", "proxy_noise_variance", p.proxy_noise_variance);
  p.constant_variance =
      cfg.get_double("priors", "constant_variance", p.constant_variance);
  p.sv_initial_variance =
      cfg.get_double("priors", "sv_initial_variance", p.sv_initial_variance);
  p.state_init_variance =
      cfg.get_double("priors", "state_init_variance", p.state_init_variance);
  p.kappa_max = cfg.get_double("priors", "kappa_max", p.kappa_max);
  p.fixed_kappa1 = cfg.get_double("priors", "fixed_kappa1", p.fixed_kappa1);
  p.fixed_kappa2 = cfg.get_double("priors", "fixed_kappa2", p.fixed_kappa2);
  return p;
}

std::string output_dir(const ConfigFile& cfg, const std::string& flag_value) {
  if (const char* env = std::getenv("FAVAR_OUTPUT_DIR")) return env;
  if (!flag_value.empty()) return flag_value;
  return cfg.get("output", "dir", "out");
}

void write_matrix_csv(const std::string& path,
                      const std::vector<std::string>& names,
                      const std::vector<Month>& dates, const MatrixXd& m) {
  Table t;
  t.names = names;
  for (Month d : dates) t.dates.push_back(to_string(d));
  t.values = m;
  write_table(path, t);
}

// ---------------------------------------------------------------------- //
// subcommands
// ---------------------------------------------------------------------- //

int cmd_simulate(const ConfigFile& cfg, const std::string& out_flag) {
  const ModelSpec spec = spec_from_config(cfg);
  const PriorConfig priors = priors_from_config(cfg);
  const int T = cfg.get_int("simulate", "T", 252);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_double("simulate", "seed", 1));
  TrueParamKnobs knobs;
  knobs.own_lag = cfg.get_double("simulate", "own_lag", knobs.own_lag);
  knobs.phi01 = cfg.get_double("simulate", "phi01", knobs.phi01);
  knobs.phi02 = cfg.get_double("simulate", "phi02", knobs.phi02);
  knobs.noise_scale =
      cfg.get_double("simulate", "noise_scale", knobs.noise_scale);
  knobs.sv_walk_variance =
      cfg.get_double("simulate", "sv_walk_variance", knobs.sv_walk_variance);

  const McmcState truth = default_true_params(spec, T, knobs);
  const DgpTruth dgp = simulate_dgp(spec, truth, T, seed, priors);
  require_valid(spec, dgp.data, priors);

  const std::string dir = output_dir(cfg, out_flag);
  save_dataset(dir, dgp.data, /*z_already_standardized=*/true);

  write_matrix_csv(fs::path(dir) / "truth_factors.csv", {"f_out", "f_inf"},
                   dgp.data.dates, dgp.factors);
  write_matrix_csv(fs::path(dir) / "truth_h_out.csv", dgp.data.country_names,
                   dgp.data.dates, dgp.h_out);
  write_matrix_csv(fs::path(dir) / "truth_h_inf.csv", dgp.data.country_names,
                   dgp.data.dates, dgp.h_inf);
  {
    std::vector<std::string> shock_names;
    for (int j = 0; j < spec.n_var(); ++j)
      shock_names.push_back("eps" + std::to_string(j));
    write_matrix_csv(fs::path(dir) / "truth_shocks.csv", shock_names,
                     dgp.data.dates, dgp.shocks);
  }
  {
    McmcState full = truth;
    full.factors = dgp.factors;
    full.presample = dgp.presample;
    full.h_out = dgp.h_out;
    full.h_inf = dgp.h_inf;
    PosteriorDraws one;
    one.states.push_back(full);
    one.draw_indices.push_back(0);
    one.seed = seed;
    save_draws((fs::path(dir) / "truth_params").string(), one, spec, priors);
  }
  std::cout << "simulated T=" << T << " months into " << dir << "\n";
  return 0;
}

int cmd_build_instrument(const std::string& input, const std::string& out_dir,
                         const std::string& method,
                         const std::vector<std::string>& exclude_dates) {
  const Table table = read_table(input);
  if (table.names.size() < 5 ||
      table.names != std::vector<std::string>{"ois_1m", "ois_3m", "ois_6m",
                                              "ois_1y", "stoxx"})
    throw Error(ErrorCode::IoError,
                input + ": header must be date,ois_1m,ois_3m,ois_6m,ois_1y,stoxx");
  AnnouncementPanel panel;
  for (const std::string& d : table.dates) panel.dates.push_back(parse_day(d));
  panel.ois = table.values.leftCols(4);
  panel.stock = table.values.col(4);
  panel = apply_exclusions(panel, exclude_dates);
  if (panel.events() < 3)
    throw Error(ErrorCode::DegeneratePanel, "fewer than 3 events after exclusions");

  Month first = panel.dates.front().month_index();
  Month last = panel.dates.back().month_index();
  for (const Day& d : panel.dates) {
    first = std::min(first, d.month_index());
    last = std::max(last, d.month_index());
  }
  const int count = last.ym - first.ym + 1;

  fs::create_directories(out_dir);
  const auto write_series = [&](const std::string& name, const RawSeries& s) {
    Table t;
    t.names = {name};
    for (Month m : s.months) t.dates.push_back(to_string(m));
    t.values = s.values;
    write_table((fs::path(out_dir) / (name + ".csv")).string(), t);
  };

  if (method == "rotational") {
    const InstrumentPair pair = build_rotational_instrument(panel);
    write_series("m", events_to_monthly(panel.dates, pair.m, first, count));
    write_series("cbi", events_to_monthly(panel.dates, pair.cbi, first, count));
    std::cout << "gamma=" << pair.gamma << " alpha=" << pair.alpha << "\n";
  } else if (method == "poor-mans") {
    write_series("m", events_to_monthly(panel.dates, poor_mans_proxy(panel),
                                        first, count));
  } else if (method == "ois3m") {
    write_series("m", events_to_monthly(panel.dates, panel.ois.col(1), first,
                                        count));
  } else if (method == "pc-raw") {
    write_series("m", events_to_monthly(panel.dates,
                                        ois_principal_component(panel), first,
                                        count));
  } else {
    throw Error(ErrorCode::ConfigError, "unknown method '" + method + "'");
  }
  return 0;
}

struct PrepareFlags {
  std::string growth_method = "standard";
  double outlier_critical = 3.5;
  std::string aggregation_rule = "mean";
};

GrowthMethod parse_growth(const std::string& s) {
  if (s == "standard") return GrowthMethod::Standard;
  if (s == "log") return GrowthMethod::Log;
  if (s == "symmetric") return GrowthMethod::Symmetric;
  throw Error(ErrorCode::ConfigError, "unknown growth method '" + s + "'");
}

AggregationRule parse_rule(const std::string& s) {
  if (s == "mean") return AggregationRule::Mean;
  if (s == "sum") return AggregationRule::Sum;
  if (s == "end-of-month") return AggregationRule::EndOfMonth;
  throw Error(ErrorCode::ConfigError, "unknown aggregation rule '" + s + "'");
}

RawSeries load_series(const std::string& path, Frequency freq,
                      const std::string& name) {
  const Table t = read_table(path);
  RawSeries s;
  s.frequency = freq;
  s.name = name;
  s.values = t.values.col(0);
  if (freq == Frequency::Daily) {
    for (const std::string& d : t.dates) s.days.push_back(parse_day(d));
  } else {
    for (const std::string& d : t.dates) s.months.push_back(parse_month(d));
  }
  return s;
}

// prepare-data: per-country raw series -> the four DataSet blocks.
// Config sections: [countries] codes = EA19, AT, ...; per-country files
// gdp.<code>, ip.<code>, unemp.<code>, hicp.<code> under [raw]; z series as
// name = path, frequency, transform, rule lines under [z]; [m] file = path.
int cmd_prepare_data(const ConfigFile& cfg, const PrepareFlags& flags,
                     const std::string& out_flag) {
  const std::vector<std::string> codes =
      split_list(cfg.get("countries", "codes", ""));
  if (codes.empty() || codes.front() != "EA19")
    throw Error(ErrorCode::ConfigError,
                "[countries] codes must list EA19 first");
  const GrowthMethod growth = parse_growth(flags.growth_method);

  std::vector<RawSeries> gdp_monthly, hicp_growth;
  OutlierReport combined_report;
  std::vector<OutlierReport> reports;
  for (const std::string& code : codes) {
    const auto need = [&](const std::string& kind) {
      const std::string key = kind + "." + code;
      if (!cfg.has("raw", key))
        throw Error(ErrorCode::ConfigError,
                    "missing [raw] " + key + " in " + cfg.path);
      return cfg.get("raw", key);
    };
    RawSeries gdp = load_series(need("gdp"), Frequency::Quarterly, "gdp_" + code);
    RawSeries ip = load_series(need("ip"), Frequency::Monthly, "ip_" + code);
    RawSeries unemp =
        load_series(need("unemp"), Frequency::Monthly, "unemp_" + code);
    RawSeries hicp =
        load_series(need("hicp"), Frequency::Monthly, "hicp_" + code);

    // outlier pass on GDP and industrial production before interpolation
    auto [gdp_adj, rep1] = adjust_additive_outliers(gdp, flags.outlier_critical);
    auto [ip_adj, rep2] = adjust_additive_outliers(ip, flags.outlier_critical);
    reports.push_back(rep1);
    reports.push_back(rep2);

    RawSeries monthly = chow_lin_interpolate(gdp_adj, {ip_adj, unemp});
    monthly.name = "gdp_" + code;
    gdp_monthly.push_back(annual_growth(monthly, growth));
    hicp_growth.push_back(annual_growth(hicp, growth));
  }

  // z block
  std::vector<RawSeries> z_series;
  std::vector<std::string> z_names;
  if (cfg.values.count("z")) {
    for (const auto& [name, entry] : cfg.values.at("z")) {
      const std::vector<std::string> parts = split_list(entry.first);
      if (parts.empty())
        throw Error(ErrorCode::ConfigError,
                    cfg.path + ":" + std::to_string(entry.second) +
                        ": expected path[, frequency[, transform[, rule]]]");
      const std::string path = parts[0];
      const std::string freq = parts.size() > 1 ? parts[1] : "monthly";
      const std::string transform = parts.size() > 2 ? parts[2] : "level";
      const std::string rule = parts.size() > 3 ? parts[3] : flags.aggregation_rule;
      RawSeries s = load_series(path,
                                freq == "daily" ? Frequency::Daily
                                                : Frequency::Monthly,
                                name);
      if (freq == "daily") s = aggregate_to_monthly(s, parse_rule(rule));
      if (transform == "log") {
        for (int t = 0; t < s.size(); ++t) {
          if (!(s.values(t) > 0.0))
            throw Error(ErrorCode::NonPositiveLevel,
                        "log transform of non-positive value in " + name);
          s.values(t) = std::log(s.values(t));
        }
      }
      z_series.push_back(std::move(s));
      z_names.push_back(name);
    }
  }
  const std::string m_path = cfg.get("m", "file", "");
  if (m_path.empty())
    throw Error(ErrorCode::ConfigError, "missing [m] file = path");
  RawSeries m_series = load_series(m_path, Frequency::Monthly, "m");

  // align everything on the common span
  std::vector<const RawSeries*> all;
  for (const auto& s : gdp_monthly) all.push_back(&s);
  for (const auto& s : hicp_growth) all.push_back(&s);
  for (const auto& s : z_series) all.push_back(&s);
  all.push_back(&m_series);
  const auto [first, count] = common_span(all);

  DataSet data;
  data.dates = month_range(first, count);
  data.country_names = codes;
  data.z_names = z_names;
  const int N1 = static_cast<int>(codes.size());
  data.x_out.resize(count, N1);
  data.x_inf.resize(count, N1);
  for (int i = 0; i < N1; ++i) {
    data.x_out.col(i) = slice_months(gdp_monthly[i], first, count);
    data.x_inf.col(i) = slice_months(hicp_growth[i], first, count);
  }
  data.z.resize(count, static_cast<int>(z_series.size()));
  for (size_t j = 0; j < z_series.size(); ++j)
    data.z.col(static_cast<int>(j)) = slice_months(z_series[j], first, count);
  data.m.resize(count, 1);
  data.m.col(0) = slice_months(m_series, first, count);
  data.z_mean = VectorXd::Zero(data.z.cols());
  data.z_stdev = VectorXd::Ones(data.z.cols());

  const std::string dir = output_dir(cfg, out_flag);
  save_dataset(dir, data, /*z_already_standardized=*/true);

  // z is written raw here (standardization happens at load time)
  {
    std::ofstream rep(fs::path(dir) / "outlier_report.csv");
    rep << "series,date,original,adjusted,statistic\n";
    for (const auto& r : reports)
      for (const auto& rec : r.records)
        rep << r.series << ',' << to_string(rec.date) << ','
            << format_double(rec.original) << ',' << format_double(rec.adjusted)
            << ',' << format_double(rec.statistic) << '\n';
  }
  std::cout << "prepared " << count << " months x " << N1 << " countries into "
            << dir << "\n";
  return 0;
}

int run_single_chain(const ModelSpec& spec, const DataSet& data,
                     const PriorConfig& priors, std::uint64_t seed,
                     const std::string& dir, const std::string& data_dir) {
  const auto start = std::chrono::steady_clock::now();
  GibbsSampler sampler(spec, data, priors, seed);
  const PosteriorDraws draws = sampler.run([&](int done, int total) {
    std::cerr << "chain " << seed << ": sweep " << done << "/" << total << "\n";
  });
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::map<std::string, std::string> extra;
  extra["wall_seconds"] = format_double(wall);
  extra["data_dir"] = data_dir;
  extra["data_hash"] = dataset_content_hash(data_dir);
  const ImpactDiagnostics& diag = sampler.diagnostics();
  extra["u_proposals"] = std::to_string(diag.u_proposals);
  extra["u_accepts"] = std::to_string(diag.u_accepts);
  extra["r1_proposals"] = std::to_string(diag.r1_proposals);
  extra["r1_accepts"] = std::to_string(diag.r1_accepts);
  save_draws(dir, draws, spec, priors, extra);
  return 0;
}

int cmd_estimate(const ConfigFile& cfg, const std::string& data_flag,
                 const std::string& out_flag, long long seed_flag,
                 int chains_flag) {
  const ModelSpec spec = spec_from_config(cfg);
  const PriorConfig priors = priors_from_config(cfg);
  const std::string data_dir =
      data_flag.empty() ? cfg.get("data", "dir", "") : data_flag;
  if (data_dir.empty())
    throw Error(ErrorCode::ConfigError, "no data directory ([data] dir or --data)");
  const DataSet data = load_dataset(data_dir);
  require_valid(spec, data, priors);

  const std::uint64_t seed =
      seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                     : static_cast<std::uint64_t>(cfg.get_double("mcmc", "seed", 1));
  const int chains =
      chains_flag > 0 ? chains_flag : cfg.get_int("mcmc", "chains", 1);
  const std::string dir = output_dir(cfg, out_flag);

  if (chains == 1) {
    return run_single_chain(spec, data, priors, seed, dir, data_dir);
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(chains);
  for (int c = 0; c < chains; ++c)
    workers.emplace_back([&, c] {
      try {
        run_single_chain(spec, data, priors, seed + c,
                         (fs::path(dir) / ("chain_" + std::to_string(c))).string(),
                         data_dir);
      } catch (...) {
        failures[c] = std::current_exception();
      }
    });
  for (auto& w : workers) w.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return 0;
}

int cmd_irf(const std::string& draws_dir, const std::string& data_dir,
            const std::string& out_dir, int horizons, int shock,
            double target) {
  const LoadedDraws loaded = load_draws(draws_dir);
  if (loaded.draws.empty())
    throw Error(ErrorCode::EmptyDraws, "no draws in " + draws_dir);
  const DataSet data = load_dataset(data_dir);
  const IrfSet irf =
      compute_irfs(loaded.draws, loaded.spec, horizons, shock, data.z_stdev,
                   target);
  fs::create_directories(out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "irf_draws.csv");
    out << "draw,variable,horizon,value\n";
    for (int d = 0; d < irf.draws(); ++d)
      for (size_t v = 0; v < irf.names.size(); ++v)
        for (int h = 0; h <= horizons; ++h)
          out << loaded.draws.draw_indices[d] << ',' << irf.names[v] << ','
              << h << ',' << format_double(irf.responses[d](static_cast<int>(v), h))
              << '\n';
  }
  {
    std::ofstream out(fs::path(out_dir) / "irf_summary.csv");
    out << "variable,horizon,q16,q50,q84\n";
    for (const SummaryRow& row : summarize(irf))
      out << row.name << ',' << row.horizon << ',' << format_double(row.q16)
          << ',' << format_double(row.q50) << ',' << format_double(row.q84)
          << '\n';
  }
  std::cout << "wrote IRFs for " << irf.draws() << " draws, H=" << horizons
            << "\n";
  return 0;
}

void write_country_block(const std::string& path,
                         const std::vector<std::string>& countries,
                         const std::vector<MatrixXd>& responses) {
  std::ofstream out(path);
  out << "country,horizon,q16,q50,q84\n";
  const int H1 = static_cast<int>(responses[0].cols());
  std::vector<double> cell(responses.size());
  for (size_t i = 0; i < countries.size(); ++i)
    for (int h = 0; h < H1; ++h) {
      for (size_t d = 0; d < responses.size(); ++d)
        cell[d] = responses[d](static_cast<int>(i), h);
      out << countries[i] << ',' << h << ','
          << format_double(quantile_type7(cell, 0.16)) << ','
          << format_double(quantile_type7(cell, 0.5)) << ','
          << format_double(quantile_type7(cell, 0.84)) << '\n';
    }
}

int cmd_report(const std::string& draws_dir, const std::string& data_dir,
               const std::string& out_dir, int horizons,
               const std::string& benchmark,
               const std::string& characteristics_path) {
  const LoadedDraws loaded = load_draws(draws_dir);
  const ModelSpec& spec = loaded.spec;
  const DataSet data = load_dataset(data_dir);
  const IrfSet irf =
      compute_irfs(loaded.draws, spec, horizons, 0, data.z_stdev);
  const CountryIrf country = decompose_country_responses(irf, loaded.draws, spec);
  fs::create_directories(out_dir);

  // loadings summary (medians with 68% bands)
  {
    std::ofstream out(fs::path(out_dir) / "loadings_summary.csv");
    out << "block,country,lag,q16,q50,q84\n";
    std::vector<double> cell(loaded.draws.size());
    for (int block = 0; block < 2; ++block)
      for (int i = 0; i < spec.n_series_per_block(); ++i)
        for (int p = 0; p <= spec.factor_lag_order; ++p) {
          for (int d = 0; d < loaded.draws.size(); ++d) {
            const McmcState& s = loaded.draws.states[d];
            cell[d] = (block == 0 ? s.lambda_out : s.lambda_inf)(i, p);
          }
          out << (block == 0 ? "out" : "inf") << ','
              << data.country_names[i] << ',' << p << ','
              << format_double(quantile_type7(cell, 0.16)) << ','
              << format_double(quantile_type7(cell, 0.5)) << ','
              << format_double(quantile_type7(cell, 0.84)) << '\n';
        }
  }

  // reliability posterior
  {
    std::vector<double> rho(loaded.draws.size());
    const int n = spec.n_var();
    for (int d = 0; d < loaded.draws.size(); ++d) {
      const MatrixXd& B = loaded.draws.states[d].B;
      rho[d] = reliability_indicator(B(n - 1, 0), B(n - 1, n - 1));
    }
    std::ofstream out(fs::path(out_dir) / "reliability.csv");
    out << "q16,q50,q84\n";
    out << format_double(quantile_type7(rho, 0.16)) << ','
        << format_double(quantile_type7(rho, 0.5)) << ','
        << format_double(quantile_type7(rho, 0.84)) << '\n';
  }

  // exposure fits
  {
    std::ofstream out(fs::path(out_dir) / "exposure_fit.csv");
    out << "block,country,r_squared\n";
    for (int block = 0; block < 2; ++block)
      for (int i = 0; i < spec.n_series_per_block(); ++i) {
        const VectorXd x =
            (block == 0 ? data.x_out : data.x_inf).col(i);
        const ExposureFit fit = exposure_fit(x, loaded.draws, spec, block, i);
        out << (block == 0 ? "out" : "inf") << ',' << data.country_names[i]
            << ',' << format_double(fit.r_squared) << '\n';
      }
  }

  // country responses by channel
  write_country_block(fs::path(out_dir) / "country_out_total.csv",
                      data.country_names, country.total_out);
  write_country_block(fs::path(out_dir) / "country_out_common.csv",
                      data.country_names, country.common_out);
  write_country_block(fs::path(out_dir) / "country_out_channel.csv",
                      data.country_names, country.channel_out);
  write_country_block(fs::path(out_dir) / "country_inf_total.csv",
                      data.country_names, country.total_inf);
  write_country_block(fs::path(out_dir) / "country_inf_common.csv",
                      data.country_names, country.common_inf);
  write_country_block(fs::path(out_dir) / "country_inf_channel.csv",
                      data.country_names, country.channel_inf);

  // coefficients of variation at the table horizons
  {
    const CovBenchmark bench = benchmark == "ea19" ? CovBenchmark::Ea19
                                                   : CovBenchmark::CountryMean;
    std::vector<int> hs = {0, 6, 12, 24};
    hs.erase(std::remove_if(hs.begin(), hs.end(),
                            [&](int h) { return h > horizons; }),
             hs.end());
    const auto write_cov = [&](const std::string& name,
                               const std::vector<MatrixXd>& total,
                               const std::vector<MatrixXd>& common,
                               const std::vector<MatrixXd>& channel) {
      std::ofstream out(fs::path(out_dir) / name);
      out << "response";
      for (int h : hs) out << ",h" << h << ",h" << h << "_lo,h" << h << "_hi";
      out << '\n';
      const auto row = [&](const std::string& label,
                           const std::vector<MatrixXd>& resp) {
        const CovTable t = coefficient_of_variation(resp, hs, bench);
        out << label;
        for (size_t i = 0; i < hs.size(); ++i)
          out << ',' << format_double(t.median(static_cast<int>(i))) << ','
              << format_double(t.lo(static_cast<int>(i))) << ','
              << format_double(t.hi(static_cast<int>(i)));
        out << '\n';
      };
      row("aggregate", total);
      row("common_cycle", common);
      if (spec.include_country_channels) row("country_channel", channel);
    };
    write_cov("cov_output.csv", country.total_out, country.common_out,
              country.channel_out);
    write_cov("cov_inflation.csv", country.total_inf, country.common_inf,
              country.channel_inf);
  }

  // correlation table against structural characteristics, when provided
  if (!characteristics_path.empty()) {
    const Table chars = read_table(characteristics_path);
    const int N = spec.n_countries;
    if (chars.rows() != N)
      throw Error(ErrorCode::DimensionMismatch,
                  "characteristics must have one row per country (EA19 excluded)");
    VectorXd channel_peaks(N), common_peaks(N);
    for (int i = 0; i < N; ++i) {
      channel_peaks(i) = peak_response(country.channel_out, i + 1);
      common_peaks(i) = peak_response(country.common_out, i + 1);
    }
    const auto rows = correlation_table(channel_peaks, common_peaks,
                                        chars.values, chars.names);
    std::ofstream out(fs::path(out_dir) / "correlation.csv");
    out << "characteristic,r_channel,stars_channel,r_common,stars_common,"
           "r_semi_partial,stars_semi_partial\n";
    for (const CorrelationRow& row : rows)
      out << row.characteristic << ',' << format_double(row.r_channel) << ','
          << significance_stars(row.p_channel) << ','
          << format_double(row.r_common) << ','
          << significance_stars(row.p_common) << ','
          << format_double(row.r_semi_partial) << ','
          << significance_stars(row.p_semi_partial) << '\n';
  }
  std::cout << "report written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sign-restricted proxy FAVAR: estimation and analysis"};
  app.require_subcommand(1);

  std::string config_path, out_flag, data_flag, draws_flag;
  long long seed_flag = -1;
  int chains_flag = 0;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim->add_option("--config", config_path, "configuration file")->required();
  sim->add_option("--output", out_flag, "output directory");

  auto* prep = app.add_subcommand("prepare-data", "raw series to DataSet blocks");
  PrepareFlags prep_flags;
  prep->add_option("--config", config_path, "configuration file")->required();
  prep->add_option("--output", out_flag, "output directory");
  prep->add_option("--growth-method", prep_flags.growth_method,
                   "standard|log|symmetric");
  prep->add_option("--outlier-critical", prep_flags.outlier_critical,
                   "additive-outlier critical value");
  prep->add_option("--aggregation-rule", prep_flags.aggregation_rule,
                   "mean|sum|end-of-month");

  auto* instr = app.add_subcommand("build-instrument",
                                   "announcement panel to monthly instrument");
  std::string instr_input, instr_method = "rotational";
  std::vector<std::string> exclude_dates;
  instr->add_option("input", instr_input, "announcement CSV")->required();
  instr->add_option("--output", out_flag, "output directory")->required();
  instr->add_option("--method", instr_method,
                    "rotational|poor-mans|ois3m|pc-raw");
  instr->add_option("--exclude-dates", exclude_dates,
                    "event dates to drop (YYYY-MM-DD)");

  auto* est = app.add_subcommand("estimate", "run the Gibbs sampler");
  est->add_option("--config", config_path, "configuration file")->required();
  est->add_option("--data", data_flag, "DataSet directory");
  est->add_option("--output", out_flag, "draws directory");
  est->add_option("--seed", seed_flag, "chain seed");
  est->add_option("--chains", chains_flag, "independent chains");

  auto* irf = app.add_subcommand("irf", "impulse responses from stored draws");
  int horizons = 36, shock = 0;
  double target = -0.25;
  irf->add_option("--draws", draws_flag, "draws directory")->required();
  irf->add_option("--data", data_flag, "DataSet directory")->required();
  irf->add_option("--output", out_flag, "output directory")->required();
  irf->add_option("--horizons", horizons, "maximum horizon");
  irf->add_option("--shock", shock, "structural shock column");
  irf->add_option("--target", target, "policy-rate impact normalization");

  auto* rep = app.add_subcommand("report", "summary tables and decompositions");
  std::string benchmark = "country-mean", characteristics;
  rep->add_option("--draws", draws_flag, "draws directory")->required();
  rep->add_option("--data", data_flag, "DataSet directory")->required();
  rep->add_option("--output", out_flag, "output directory")->required();
  rep->add_option("--horizons", horizons, "maximum horizon");
  rep->add_option("--cov-benchmark", benchmark, "country-mean|ea19");
  rep->add_option("--characteristics", characteristics,
                  "country characteristics CSV for the correlation table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(parse_config(config_path), out_flag);
    if (prep->parsed())
      return cmd_prepare_data(parse_config(config_path), prep_flags, out_flag);
    if (instr->parsed())
      return cmd_build_instrument(instr_input, out_flag, instr_method,
                                  exclude_dates);
    if (est->parsed())
      return cmd_estimate(parse_config(config_path), data_flag, out_flag,
                          seed_flag, chains_flag);
    if (irf->parsed())
      return cmd_irf(draws_flag, data_flag, out_flag, horizons, shock, target);
    if (rep->parsed())
      return cmd_report(draws_flag, data_flag, out_flag, horizons, benchmark,
                        characteristics);
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what()
              << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
