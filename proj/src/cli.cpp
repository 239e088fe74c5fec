#include "depmet/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "depmet/config.hpp"
#include "depmet/error.hpp"
#include "depmet/experiments.hpp"
#include "depmet/report.hpp"

namespace depmet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::string out = "results";
  std::string measures;
  std::string alpha;
  double mic_alpha = 0.6;
  int mic_c = 15;
  bool timing = false;
  bool power = false;
  // generate / measure
  std::string model = "Linear";
  double sigma = 0.0;
  std::size_t n = 1000;
  std::string marginal = "StandardNormal";
  std::string in;
  std::string out_file;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<MeasureKind> parse_measure_list(const std::string& s) {
  std::vector<MeasureKind> out;
  for (const auto& name : split_list(s)) {
    const auto m = parse_measure(name);
    if (!m) throw Error(ErrorKind::ConfigError, "measures: unknown measure '" + name + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw Error(ErrorKind::ConfigError, "measures: empty list");
  return out;
}

std::vector<double> parse_alpha_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    char* end = nullptr;
    const double a = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || !(a > 0.0 && a < 1.0))
      throw Error(ErrorKind::ConfigError, "alpha: '" + item + "' must be a number in (0, 1)");
    out.push_back(a);
  }
  if (out.empty()) throw Error(ErrorKind::ConfigError, "alpha: empty list");
  return out;
}

std::string read_text(const std::string& path, ErrorKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(kind, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_measure_flags(CLI::App* sub, Options& o) {
  sub->add_option("--measures", o.measures,
                  "Comma-separated measures: pearson,spearman,maxcorr,dcor,r1,mic");
  sub->add_option("--mic-alpha", o.mic_alpha, "MIC grid-bound exponent in (0, 1]");
  sub->add_option("--mic-c", o.mic_c, "MIC superclump factor (positive integer)");
}

void add_experiment_flags(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON configuration file");
  sub->add_option("--seed", o.seed, "Master seed (overrides master_seed)");
  sub->add_option("--reps", o.reps, "Repetitions per sweep point (overrides repetitions)");
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  add_measure_flags(sub, o);
  sub->add_option("--alpha", o.alpha,
                  "Significance level; critical accepts a comma-separated list");
  sub->add_flag("--timing", o.timing, "Record wall-clock seconds in the metadata (breaks byte-identity)");
}

RunConfig load_config(Command cmd, const Options& o, const CLI::App& sub) {
  RunConfig cfg = o.config.empty() ? default_config(cmd)
                                   : parse_config_text(read_text(o.config, ErrorKind::ConfigError), cmd);
  auto& e = cfg.experiment;
  if (sub.count("--seed")) e.master_seed = o.seed;
  if (sub.count("--reps")) {
    if (o.reps < 1) throw Error(ErrorKind::ConfigError, "reps: must be >= 1");
    e.repetitions = o.reps;
    cfg.null_repetitions = o.reps;
    cfg.power_repetitions = o.reps;
  }
  if (sub.count("--measures")) e.measures = parse_measure_list(o.measures);
  if (sub.count("--alpha")) {
    const auto alphas = parse_alpha_list(o.alpha);
    if (cmd == Command::Critical) {
      e.alpha_levels = alphas;
    } else {
      if (alphas.size() != 1) throw Error(ErrorKind::ConfigError, "alpha: expected a single value");
      cfg.alpha = alphas.front();
    }
  }
  if (sub.count("--mic-alpha")) {
    if (!(o.mic_alpha > 0.0 && o.mic_alpha <= 1.0))
      throw Error(ErrorKind::ConfigError, "mic-alpha: must lie in (0, 1]");
    e.settings.mic.alpha = o.mic_alpha;
  }
  if (sub.count("--mic-c")) {
    if (o.mic_c < 1) throw Error(ErrorKind::ConfigError, "mic-c: must be a positive integer");
    e.settings.mic.clump_factor = o.mic_c;
  }
  if (cmd == Command::SizeSweep && o.power && cfg.power_n_values.empty())
    for (std::size_t n = 10; n <= 50; n += 5) cfg.power_n_values.push_back(n);
  validate(cfg);
  return cfg;
}

std::vector<std::string> measure_columns(const std::vector<MeasureKind>& ms) {
  std::vector<std::string> cols;
  for (auto m : ms) cols.emplace_back(display_name(m));
  return cols;
}

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json base_metadata(const RunConfig& cfg) {
  json m;
  m["command"] = std::string(to_string(cfg.command));
  m["version"] = kVersion;
  m["seed"] = cfg.experiment.master_seed;
  m["repetitions"] = cfg.experiment.repetitions;
  m["config"] = to_json(cfg);
  m["config_hash"] = config_hash(cfg);
  return m;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, const Options& o, std::ostream& out)
      : cfg_(cfg), opts_(o), out_(out), start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create output directory " + o.out);
  }

  void emit(ResultTable t, const std::string& file) {
    if (opts_.timing)
      t.metadata["wall_clock_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path p = fs::path(opts_.out) / file;
    write_csv(t, p);
    out_ << "wrote " << p.string() << "\n";
  }

  void emit_svg(const PlotSpec& spec, const std::string& file) {
    const fs::path p = fs::path(opts_.out) / file;
    render_svg(spec, p);
    out_ << "wrote " << p.string() << "\n";
  }

 private:
  const RunConfig& cfg_;
  const Options& opts_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
};

ResultTable averages_table(const RunConfig& cfg, const std::vector<AverageRow>& rows,
                           const std::string& title) {
  const auto& e = cfg.experiment;
  bool one_model = true, same_sigma = true, same_n = true;
  for (const auto& r : rows) {
    one_model &= r.model == rows.front().model;
    same_sigma &= r.point.sigma == rows.front().point.sigma;
    same_n &= r.point.n == rows.front().point.n;
  }
  std::string header;
  if (!one_model) header = (same_sigma && same_n) ? "model" : "model/point";
  else if (same_n && !same_sigma) header = "sigma";
  else if (same_sigma && !same_n) header = "n";
  else if (same_sigma && same_n) header = "model";
  else header = "point";

  ResultTable t(title, header, measure_columns(e.measures));
  t.metadata = base_metadata(cfg);
  json excluded = json::object();
  for (const auto& r : rows) {
    const std::string point = "sigma=" + short_real(r.point.sigma) + ",n=" + std::to_string(r.point.n);
    std::string label;
    if (header == "model") label = to_string(r.model);
    else if (header == "sigma") label = short_real(r.point.sigma);
    else if (header == "n") label = std::to_string(r.point.n);
    else if (header == "point") label = point;
    else label = std::string(to_string(r.model)) + "/" + point;
    std::vector<double> values;
    json ex = json::object();
    for (auto m : e.measures) {
      const auto& cell = *r.cells[index_of(m)];
      values.push_back(cell.mean);
      ex[std::string(ascii_name(m))] = cell.excluded;
    }
    excluded[label] = ex;
    t.add_row(label, values);
  }
  t.metadata["excluded"] = excluded;
  return t;
}

PlotSpec power_plot(const std::vector<PowerCurve>& curves, const std::string& title,
                    const std::string& x_label) {
  std::vector<PlotSeries> series;
  for (const auto& c : curves) {
    PlotSeries s;
    s.label = display_name(c.measure);
    for (std::size_t i = 0; i < c.abscissa.size(); ++i) {
      if (std::isnan(c.power[i])) continue;
      s.x.push_back(c.abscissa[i]);
      s.y.push_back(c.power[i]);
    }
    if (!s.x.empty()) series.push_back(std::move(s));
  }
  return PlotSpec(PlotKind::PowerCurve, title, x_label, "power", std::move(series));
}

ResultTable power_table(const RunConfig& cfg, const std::vector<PowerCurve>& curves,
                        const std::string& title, const std::string& header) {
  ResultTable t(title, header, measure_columns(cfg.experiment.measures));
  t.metadata = base_metadata(cfg);
  json counts = json::object();
  const std::size_t points = curves.front().abscissa.size();
  for (std::size_t i = 0; i < points; ++i) {
    const std::string label = short_real(curves.front().abscissa[i]);
    std::vector<double> values;
    json c = json::object();
    for (const auto& curve : curves) {
      values.push_back(curve.power[i]);
      c[std::string(ascii_name(curve.measure))] = {{"exceed", curve.exceed[i]},
                                                   {"valid", curve.valid[i]}};
    }
    counts[label] = c;
    t.add_row(label, values);
  }
  t.metadata["counts"] = counts;
  return t;
}

json thresholds_json(const CriticalValueTable& crit) {
  json j = json::object();
  for (auto m : crit.measures) {
    json per = json::object();
    for (double a : crit.alphas) per[short_real(a)] = crit.threshold(m, a);
    j[std::string(ascii_name(m))] = per;
  }
  return j;
}

void run_experiment(Command cmd, const Options& o, const CLI::App& sub, std::ostream& out) {
  const RunConfig cfg = load_config(cmd, o, sub);
  const auto& e = cfg.experiment;
  Runner run(cfg, o, out);
  switch (cmd) {
    case Command::Table1:
      run.emit(averages_table(cfg, average_values(e), "Average coefficient values by model"),
               "table1.csv");
      break;
    case Command::NoiseSweep:
      run.emit(averages_table(cfg, average_values(e), "Average coefficient values by noise level"),
               "noise_sweep.csv");
      break;
    case Command::SizeSweep: {
      run.emit(averages_table(cfg, average_values(e), "Average coefficient values by sample size"),
               "size_sweep.csv");
      if (!cfg.power_n_values.empty()) {
        const auto curves = size_sweep_power(cfg.power_n_values, cfg.alpha, cfg.power_repetitions,
                                             e.master_seed, e.measures, e.settings, e.threads);
        auto t = power_table(cfg, curves, "Power against sample size (linear model, sigma = 1)", "n");
        t.metadata["alpha"] = cfg.alpha;
        t.metadata["repetitions"] = cfg.power_repetitions;
        run.emit(t, "size_power.csv");
        run.emit_svg(power_plot(curves, "Power against sample size", "n"), "size_power.svg");
      }
      break;
    }
    case Command::Critical: {
      for (const auto& p : e.sweep) {
        ModelSpec null_spec = e.model;
        null_spec.kind = ModelKind::IndependentNull;
        null_spec.n = p.n;
        null_spec.seed = e.master_seed;
        const auto crit = critical_values(null_spec, e.repetitions, e.alpha_levels, e.measures,
                                          e.settings, e.threads);
        ResultTable t("Critical values under independence, n = " + std::to_string(p.n), "alpha",
                      measure_columns(e.measures));
        t.metadata = base_metadata(cfg);
        t.metadata["n"] = p.n;
        json ex = json::object();
        for (auto m : e.measures) ex[std::string(ascii_name(m))] = crit.excluded[index_of(m)];
        t.metadata["excluded"] = ex;
        for (double a : e.alpha_levels) {
          std::vector<double> row;
          for (auto m : e.measures) row.push_back(crit.threshold(m, a));
          t.add_row(short_real(a), row);
        }
        const std::string file =
            e.sweep.size() == 1 ? "critical.csv" : "critical_n" + std::to_string(p.n) + ".csv";
        run.emit(t, file);
      }
      break;
    }
    case Command::Power: {
      std::map<std::size_t, CriticalValueTable> crits;
      for (const auto& p : e.sweep) {
        if (crits.count(p.n)) continue;
        ModelSpec null_spec = e.model;
        null_spec.kind = ModelKind::IndependentNull;
        null_spec.n = p.n;
        null_spec.seed = e.master_seed;
        crits.emplace(p.n, critical_values(null_spec, cfg.null_repetitions, {cfg.alpha}, e.measures,
                                           e.settings, e.threads));
      }
      // One curve set per n so each sweep point is tested against its own
      // null thresholds.
      std::vector<PowerCurve> curves;
      for (const auto& [n, crit] : crits) {
        ExperimentConfig sub = e;
        sub.sweep.clear();
        for (const auto& p : e.sweep)
          if (p.n == n) sub.sweep.push_back(p);
        auto part = power_sweep(sub, crit, cfg.alpha);
        if (curves.empty()) {
          curves = std::move(part);
        } else {
          for (std::size_t k = 0; k < curves.size(); ++k) {
            auto& c = curves[k];
            const auto& q = part[k];
            c.abscissa.insert(c.abscissa.end(), q.abscissa.begin(), q.abscissa.end());
            c.power.insert(c.power.end(), q.power.begin(), q.power.end());
            c.exceed.insert(c.exceed.end(), q.exceed.begin(), q.exceed.end());
            c.valid.insert(c.valid.end(), q.valid.begin(), q.valid.end());
          }
        }
      }
      const std::string model(to_string(e.model.kind));
      auto t = power_table(cfg, curves, "Power against noise, " + model + " model", "sigma");
      t.metadata["alpha"] = cfg.alpha;
      json th = json::object();
      for (const auto& [n, crit] : crits) th[std::to_string(n)] = thresholds_json(crit);
      t.metadata["thresholds"] = th;
      run.emit(t, "power.csv");
      run.emit_svg(power_plot(curves, "Power against noise, " + model + " model", "sigma"),
                   "power.svg");
      break;
    }
    case Command::Equitability: {
      const auto ecfg = cfg.equitability();
      const auto records = equitability_scan(ecfg);
      std::vector<std::string> cols{"sigma", "noise"};
      for (auto c : measure_columns(e.measures)) cols.push_back(c);
      ResultTable t("Equitability scan: coefficient values against 1 - R^2", "record", cols);
      t.metadata = base_metadata(cfg);
      for (const auto& r : records) {
        std::vector<double> row{r.sigma, r.noise};
        for (auto m : e.measures) row.push_back(r.values[index_of(m)].value_or(std::nan("")));
        t.add_row(std::string(to_string(r.function)) + "/" + short_real(r.sigma) + "/" +
                      std::to_string(r.repetition),
                  row);
      }
      run.emit(t, "equitability.csv");

      std::vector<std::string> scols{"functions"};
      for (auto c : measure_columns(e.measures)) scols.push_back(c);
      ResultTable s("Cross-function range of mean values per noise bin", "noise_bin", scols);
      s.metadata = base_metadata(cfg);
      s.metadata["bin_width"] = 0.05;
      for (const auto& b : equitability_spreads(records, e.measures, 0.05)) {
        std::vector<double> row{static_cast<double>(b.functions)};
        for (auto m : e.measures) row.push_back(b.range[index_of(m)].value_or(std::nan("")));
        s.add_row("[" + short_real(b.bin_lo) + "," + short_real(b.bin_hi) + ")", row);
      }
      run.emit(s, "equitability_spreads.csv");

      for (auto m : e.measures) {
        std::vector<PlotSeries> series;
        for (auto fn : ecfg.functions) {
          PlotSeries ps;
          ps.label = to_string(fn);
          for (const auto& r : records) {
            const auto& v = r.values[index_of(m)];
            if (r.function != fn || !v || !std::isfinite(r.noise)) continue;
            ps.x.push_back(std::clamp(r.noise, 0.0, 1.0));
            ps.y.push_back(*v);
          }
          if (!ps.x.empty()) series.push_back(std::move(ps));
        }
        if (series.empty()) continue;
        run.emit_svg(PlotSpec(PlotKind::EquitabilityScatter,
                              std::string(display_name(m)) + " against 1 - R^2", "1 - R^2",
                              std::string(display_name(m)), std::move(series)),
                     "equitability_" + std::string(ascii_name(m)) + ".svg");
      }
      break;
    }
  }
}

void run_generate(const Options& o, std::ostream& out) {
  ModelSpec spec;
  const auto kind = parse_model(o.model);
  if (!kind) throw Error(ErrorKind::ConfigError, "model: unknown model '" + o.model + "'");
  const auto marginal = parse_marginal(o.marginal);
  if (!marginal) throw Error(ErrorKind::ConfigError, "marginal: unknown marginal '" + o.marginal + "'");
  if (!(o.sigma >= 0.0) || !std::isfinite(o.sigma))
    throw Error(ErrorKind::ConfigError, "sigma: must be finite and >= 0");
  if (o.n < 1) throw Error(ErrorKind::ConfigError, "n: must be >= 1");
  spec.kind = *kind;
  spec.marginal = *marginal;
  spec.sigma = o.sigma;
  spec.n = o.n;
  spec.seed = o.seed;
  const PairedSample s = generate(spec);
  std::string body = "x,y\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    body += format_real(s.x[i]) + "," + format_real(s.y[i]) + "\n";
  if (o.out_file.empty()) {
    out << body;
  } else {
    write_file_atomic(o.out_file, body);
  }
}

PairedSample read_pairs(const std::string& path) {
  const std::string text = read_text(path, ErrorKind::IoError);
  std::vector<double> x, y;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_list(line);
    auto parse = [&](const std::string& f, double& v) {
      char* end = nullptr;
      v = std::strtod(f.c_str(), &end);
      return !f.empty() && end == f.c_str() + f.size();
    };
    double a = 0, b = 0;
    const bool ok = fields.size() == 2 && parse(fields[0], a) && parse(fields[1], b);
    if (!ok) {
      if (x.empty() && lineno == 1) continue;  // header row
      throw Error(ErrorKind::IoError, path + ":" + std::to_string(lineno) +
                                          ": expected two numeric columns");
    }
    x.push_back(a);
    y.push_back(b);
  }
  if (x.empty()) throw Error(ErrorKind::IoError, path + ": no data rows");
  return PairedSample(std::move(x), std::move(y));
}

void run_measure(const Options& o, const CLI::App& sub, std::ostream& out) {
  MeasureSettings settings;
  if (sub.count("--mic-alpha")) {
    if (!(o.mic_alpha > 0.0 && o.mic_alpha <= 1.0))
      throw Error(ErrorKind::ConfigError, "mic-alpha: must lie in (0, 1]");
    settings.mic.alpha = o.mic_alpha;
  }
  if (sub.count("--mic-c")) {
    if (o.mic_c < 1) throw Error(ErrorKind::ConfigError, "mic-c: must be a positive integer");
    settings.mic.clump_factor = o.mic_c;
  }
  std::vector<MeasureKind> measures(kAllMeasures.begin(), kAllMeasures.end());
  if (sub.count("--measures")) measures = parse_measure_list(o.measures);
  const PairedSample s = read_pairs(o.in);
  const auto row = evaluate_measures(measures, s, settings);
  for (auto m : measures) {
    const auto& r = row[index_of(m)];
    out << ascii_name(m) << ",";
    if (r.value) out << format_real(*r.value);
    else out << "error:" << to_string(*r.error);
    out << "\n";
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"depmet: dependence measures, synthetic models and evaluation protocols"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Draw one sample from a model and print it as x,y CSV");
  gen->add_option("--model", o.model, "Linear, Logarithmic, Cubic, Quadratic, Sinusoidal, Piecewise, "
                                      "Cross, Circular, Checkerboard or IndependentNull")
      ->capture_default_str();
  gen->add_option("--sigma", o.sigma, "Noise parameter (>= 0)")->capture_default_str();
  gen->add_option("--n", o.n, "Number of observations")->capture_default_str();
  gen->add_option("--marginal", o.marginal, "StandardNormal, Uniform01, ExponentialRate1 or Poisson3")
      ->capture_default_str();
  gen->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", o.out_file, "Output file (default: standard output)");

  auto* meas = app.add_subcommand("measure", "Evaluate the coefficients on a two-column CSV file");
  meas->add_option("--in", o.in, "Input CSV with two numeric columns; a header row is skipped")
      ->required();
  add_measure_flags(meas, o);

  std::vector<std::pair<CLI::App*, Command>> experiments;
  auto add_exp = [&](Command c, const char* help) {
    auto* sub = app.add_subcommand(std::string(to_string(c)), help);
    add_experiment_flags(sub, o);
    experiments.emplace_back(sub, c);
    return sub;
  };
  add_exp(Command::Table1, "Average coefficient values for every model (writes table1.csv)");
  add_exp(Command::NoiseSweep, "Average values on the linear model as sigma varies (noise_sweep.csv)");
  auto* size = add_exp(Command::SizeSweep,
                       "Average values on the linear model as n varies (size_sweep.csv)");
  size->add_flag("--power", o.power,
                 "Also estimate power against n (size_power.csv, size_power.svg)");
  add_exp(Command::Critical, "Critical values under independence (critical.csv)");
  add_exp(Command::Power, "Power against sigma for one model (power.csv, power.svg)");
  add_exp(Command::Equitability,
          "Coefficient values against 1 - R^2 for the functional models (equitability*.csv/svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << app.help();
    return 1;
  }

  try {
    if (*gen) {
      run_generate(o, out);
    } else if (*meas) {
      run_measure(o, *meas, out);
    } else {
      for (const auto& [sub, cmd] : experiments)
        if (*sub) run_experiment(cmd, o, *sub, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace depmet
