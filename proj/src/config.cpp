#include "depmet/config.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "depmet/error.hpp"
#include "depmet/rng.hpp"

namespace depmet {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::ConfigError, key + ": " + what);
}

double get_real(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, "must be finite");
  return d;
}

std::uint64_t get_u64(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::size_t get_count(const json& v, const std::string& key) {
  const auto u = get_u64(v, key);
  if (u < 1) fail(key, "must be >= 1");
  return static_cast<std::size_t>(u);
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

const json& get_array(const json& v, const std::string& key) {
  if (!v.is_array()) fail(key, "expected an array");
  if (v.empty()) fail(key, "must be nonempty");
  return v;
}

double get_sigma(const json& v, const std::string& key) {
  const double s = get_real(v, key);
  if (s < 0.0) fail("sigma", "must be >= 0 (got " + std::to_string(s) + " in '" + key + "')");
  return s;
}

double get_alpha(const json& v, const std::string& key) {
  const double a = get_real(v, key);
  if (!(a > 0.0 && a < 1.0)) fail(key, "must lie in the open interval (0, 1)");
  return a;
}

ModelKind get_model(const json& v, const std::string& key) {
  const auto name = get_string(v, key);
  const auto m = parse_model(name);
  if (!m) fail(key, "unknown model '" + name + "'");
  return *m;
}

FunctionKind get_function(const json& v, const std::string& key) {
  const auto name = get_string(v, key);
  for (FunctionKind f : kAllFunctions)
    if (to_string(f) == name) return f;
  fail(key, "unknown function '" + name + "'");
}

MeasureKind get_measure(const json& v, const std::string& key) {
  const auto name = get_string(v, key);
  const auto m = parse_measure(name);
  if (!m) fail(key, "unknown measure '" + name + "'");
  return *m;
}

std::vector<SweepPoint> cross(const std::vector<double>& sigmas, const std::vector<std::size_t>& ns) {
  std::vector<SweepPoint> out;
  for (double s : sigmas)
    for (std::size_t n : ns) out.push_back({s, n});
  return out;
}

const std::set<std::string> kKeys = {
    "model",      "models",          "marginal",          "sigma",        "sigmas",
    "n",          "n_values",        "sweep",             "repetitions",  "null_repetitions",
    "measures",   "master_seed",     "alpha_levels",      "alpha",        "mic_alpha",
    "mic_c",      "ace_max_iter",    "ace_tol",           "ace_bass",     "power_n_values",
    "power_repetitions", "functions", "noise_levels",     "equitability_sigmas"};

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Table1: return "table1";
    case Command::NoiseSweep: return "noise-sweep";
    case Command::SizeSweep: return "size-sweep";
    case Command::Critical: return "critical";
    case Command::Power: return "power";
    case Command::Equitability: return "equitability";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Table1, Command::NoiseSweep, Command::SizeSweep, Command::Critical,
                    Command::Power, Command::Equitability})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

EquitabilityConfig RunConfig::equitability() const {
  EquitabilityConfig e;
  e.functions = functions;
  e.noise_levels = noise_levels;
  e.sigmas = equitability_sigmas;
  e.n = experiment.sweep.empty() ? 1000 : experiment.sweep.front().n;
  e.repetitions = experiment.repetitions;
  e.measures = experiment.measures;
  e.master_seed = experiment.master_seed;
  e.settings = experiment.settings;
  e.threads = experiment.threads;
  return e;
}

RunConfig default_config(Command c) {
  RunConfig cfg;
  cfg.command = c;
  auto& e = cfg.experiment;
  e.model.kind = ModelKind::Linear;
  switch (c) {
    case Command::Table1:
      e.models.assign(std::begin(kAllModels), std::end(kAllModels));
      e.sweep = {{0.0, 1000}};
      e.repetitions = 200;
      break;
    case Command::NoiseSweep:
      e.sweep = cross({0.1, 0.5, 1.0, 3.0}, {1000});
      e.repetitions = 200;
      break;
    case Command::SizeSweep:
      e.sweep = cross({1.0}, {10, 100, 1000, 3000});
      e.repetitions = 200;
      break;
    case Command::Critical:
      e.model.kind = ModelKind::IndependentNull;
      e.sweep = {{0.0, 1000}};
      e.repetitions = 500;
      break;
    case Command::Power:
      e.sweep = cross({0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, {1000});
      e.repetitions = 500;
      break;
    case Command::Equitability:
      e.sweep = {{0.0, 1000}};
      e.repetitions = 200;
      break;
  }
  return cfg;
}

void validate(const RunConfig& cfg) {
  validate(cfg.experiment);
  if (cfg.command == Command::Critical || cfg.command == Command::Power) {
    const double min_alpha = cfg.command == Command::Critical
                                 ? *std::min_element(cfg.experiment.alpha_levels.begin(),
                                                     cfg.experiment.alpha_levels.end())
                                 : cfg.alpha;
    const std::size_t reps =
        cfg.command == Command::Critical ? cfg.experiment.repetitions : cfg.null_repetitions;
    if (static_cast<double>(reps) < std::ceil(1.0 / min_alpha - 1e-9))
      fail(cfg.command == Command::Critical ? "repetitions" : "null_repetitions",
           "too few repetitions for alpha " + std::to_string(min_alpha));
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail("alpha", "must lie in the open interval (0, 1)");
  if (cfg.command == Command::Critical && cfg.experiment.model.kind != ModelKind::IndependentNull)
    fail("model", "critical values are computed on the IndependentNull model");
  if (cfg.command == Command::Equitability) {
    if (cfg.functions.empty()) fail("functions", "must be nonempty");
    for (double v : cfg.noise_levels)
      if (!(v >= 0.0 && v < 1.0)) fail("noise_levels", "values must lie in [0, 1)");
    for (double s : cfg.equitability_sigmas)
      if (!(s >= 0.0)) fail("sigma", "must be >= 0");
    if (cfg.noise_levels.empty() && cfg.equitability_sigmas.empty())
      fail("noise_levels", "must be nonempty");
  }
}

RunConfig parse_config(const json& doc, Command c) {
  if (!doc.is_object()) throw Error(ErrorKind::ConfigError, "config: top level must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!kKeys.count(key)) fail(key, "unknown key");
  }
  RunConfig cfg = default_config(c);
  auto& e = cfg.experiment;

  if (doc.contains("model")) e.model.kind = get_model(doc["model"], "model");
  if (doc.contains("models")) {
    e.models.clear();
    for (const auto& v : get_array(doc["models"], "models")) e.models.push_back(get_model(v, "models"));
  }
  if (doc.contains("marginal")) {
    const auto name = get_string(doc["marginal"], "marginal");
    const auto m = parse_marginal(name);
    if (!m) fail("marginal", "unknown marginal '" + name + "'");
    e.model.marginal = *m;
  }

  const bool has_grid = doc.contains("sigma") || doc.contains("sigmas") || doc.contains("n") ||
                        doc.contains("n_values");
  if (doc.contains("sweep")) {
    if (has_grid) fail("sweep", "cannot be combined with sigma/sigmas/n/n_values");
    e.sweep.clear();
    for (const auto& p : get_array(doc["sweep"], "sweep")) {
      if (!p.is_object()) fail("sweep", "entries must be objects with 'sigma' and 'n'");
      for (const auto& [k, v] : p.items()) {
        (void)v;
        if (k != "sigma" && k != "n") fail("sweep." + k, "unknown key");
      }
      SweepPoint sp;
      if (p.contains("sigma")) sp.sigma = get_sigma(p["sigma"], "sweep.sigma");
      if (p.contains("n")) sp.n = get_count(p["n"], "sweep.n");
      e.sweep.push_back(sp);
    }
  } else if (has_grid) {
    std::vector<double> sigmas;
    std::vector<std::size_t> ns;
    for (const auto& p : e.sweep) {
      if (std::find(sigmas.begin(), sigmas.end(), p.sigma) == sigmas.end()) sigmas.push_back(p.sigma);
      if (std::find(ns.begin(), ns.end(), p.n) == ns.end()) ns.push_back(p.n);
    }
    if (doc.contains("sigma") && doc.contains("sigmas")) fail("sigma", "give either 'sigma' or 'sigmas'");
    if (doc.contains("n") && doc.contains("n_values")) fail("n", "give either 'n' or 'n_values'");
    if (doc.contains("sigma")) sigmas = {get_sigma(doc["sigma"], "sigma")};
    if (doc.contains("sigmas")) {
      sigmas.clear();
      for (const auto& v : get_array(doc["sigmas"], "sigmas")) sigmas.push_back(get_sigma(v, "sigmas"));
    }
    if (doc.contains("n")) ns = {get_count(doc["n"], "n")};
    if (doc.contains("n_values")) {
      ns.clear();
      for (const auto& v : get_array(doc["n_values"], "n_values")) ns.push_back(get_count(v, "n_values"));
    }
    e.sweep = cross(sigmas, ns);
  }

  if (doc.contains("repetitions")) e.repetitions = get_count(doc["repetitions"], "repetitions");
  if (doc.contains("null_repetitions"))
    cfg.null_repetitions = get_count(doc["null_repetitions"], "null_repetitions");
  if (doc.contains("measures")) {
    e.measures.clear();
    for (const auto& v : get_array(doc["measures"], "measures"))
      e.measures.push_back(get_measure(v, "measures"));
  }
  if (doc.contains("master_seed")) e.master_seed = get_u64(doc["master_seed"], "master_seed");
  if (doc.contains("alpha_levels")) {
    e.alpha_levels.clear();
    for (const auto& v : get_array(doc["alpha_levels"], "alpha_levels"))
      e.alpha_levels.push_back(get_alpha(v, "alpha_levels"));
  }
  if (doc.contains("alpha")) cfg.alpha = get_alpha(doc["alpha"], "alpha");
  if (doc.contains("mic_alpha")) {
    const double a = get_real(doc["mic_alpha"], "mic_alpha");
    if (!(a > 0.0 && a <= 1.0)) fail("mic_alpha", "must lie in (0, 1]");
    e.settings.mic.alpha = a;
  }
  if (doc.contains("mic_c")) {
    const auto v = get_count(doc["mic_c"], "mic_c");
    if (v > 1000) fail("mic_c", "must be <= 1000");
    e.settings.mic.clump_factor = static_cast<int>(v);
  }
  if (doc.contains("ace_max_iter"))
    e.settings.ace.max_iter = static_cast<int>(get_count(doc["ace_max_iter"], "ace_max_iter"));
  if (doc.contains("ace_tol")) {
    const double t = get_real(doc["ace_tol"], "ace_tol");
    if (!(t > 0.0)) fail("ace_tol", "must be > 0");
    e.settings.ace.tol = t;
  }
  if (doc.contains("ace_bass")) {
    const double b = get_real(doc["ace_bass"], "ace_bass");
    if (!(b >= 0.0 && b <= 10.0)) fail("ace_bass", "must lie in [0, 10]");
    e.settings.ace.bass = b;
  }
  if (doc.contains("power_n_values")) {
    cfg.power_n_values.clear();
    for (const auto& v : get_array(doc["power_n_values"], "power_n_values"))
      cfg.power_n_values.push_back(get_count(v, "power_n_values"));
  }
  if (doc.contains("power_repetitions"))
    cfg.power_repetitions = get_count(doc["power_repetitions"], "power_repetitions");
  if (doc.contains("functions")) {
    cfg.functions.clear();
    for (const auto& v : get_array(doc["functions"], "functions"))
      cfg.functions.push_back(get_function(v, "functions"));
  }
  if (doc.contains("noise_levels")) {
    cfg.noise_levels.clear();
    for (const auto& v : get_array(doc["noise_levels"], "noise_levels")) {
      const double x = get_real(v, "noise_levels");
      if (!(x >= 0.0 && x < 1.0)) fail("noise_levels", "values must lie in [0, 1)");
      cfg.noise_levels.push_back(x);
    }
  }
  if (doc.contains("equitability_sigmas")) {
    cfg.equitability_sigmas.clear();
    for (const auto& v : get_array(doc["equitability_sigmas"], "equitability_sigmas"))
      cfg.equitability_sigmas.push_back(get_sigma(v, "equitability_sigmas"));
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_text(const std::string& text, Command c) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(doc, c);
}

json to_json(const RunConfig& cfg) {
  const auto& e = cfg.experiment;
  json j;
  j["model"] = std::string(to_string(e.model.kind));
  j["models"] = json::array();
  for (auto m : e.models) j["models"].push_back(std::string(to_string(m)));
  if (j["models"].empty()) j.erase("models");
  j["marginal"] = std::string(to_string(e.model.marginal));
  j["sweep"] = json::array();
  for (const auto& p : e.sweep) j["sweep"].push_back({{"sigma", p.sigma}, {"n", p.n}});
  j["repetitions"] = e.repetitions;
  j["null_repetitions"] = cfg.null_repetitions;
  j["measures"] = json::array();
  for (auto m : e.measures) j["measures"].push_back(std::string(ascii_name(m)));
  j["master_seed"] = e.master_seed;
  j["alpha_levels"] = e.alpha_levels;
  j["alpha"] = cfg.alpha;
  j["mic_alpha"] = e.settings.mic.alpha;
  j["mic_c"] = e.settings.mic.clump_factor;
  j["ace_max_iter"] = e.settings.ace.max_iter;
  j["ace_tol"] = e.settings.ace.tol;
  j["ace_bass"] = e.settings.ace.bass;
  j["power_n_values"] = cfg.power_n_values;
  if (cfg.power_n_values.empty()) j.erase("power_n_values");
  j["power_repetitions"] = cfg.power_repetitions;
  j["functions"] = json::array();
  for (auto f : cfg.functions) j["functions"].push_back(std::string(to_string(f)));
  j["noise_levels"] = cfg.noise_levels;
  j["equitability_sigmas"] = cfg.equitability_sigmas;
  if (cfg.equitability_sigmas.empty()) j.erase("equitability_sigmas");
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canon = std::string(to_string(cfg.command)) + "\n" + to_json(cfg).dump();
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(experiment_id(canon)));
  return buf;
}

}  // namespace depmet
