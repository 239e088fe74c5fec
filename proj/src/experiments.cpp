#include "depmet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "depmet/error.hpp"
#include "depmet/measures.hpp"
#include "depmet/parallel.hpp"

namespace depmet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string point_tag(const SweepPoint& p) {
  return "sigma=" + fmt_real(p.sigma) + "/n=" + std::to_string(p.n);
}

void validate_alphas(const std::vector<double>& alphas, bool allow_one) {
  if (alphas.empty()) throw Error(ErrorKind::ConfigError, "alpha_levels: must be nonempty");
  std::set<double> seen;
  for (double a : alphas) {
    const bool ok = std::isfinite(a) && a > 0.0 && (allow_one ? a <= 1.0 : a < 1.0);
    if (!ok)
      throw Error(ErrorKind::ConfigError,
                  "alpha_levels: " + fmt_real(a) + " outside " + (allow_one ? "(0, 1]" : "(0, 1)"));
    if (!seen.insert(a).second)
      throw Error(ErrorKind::ConfigError, "alpha_levels: duplicate value " + fmt_real(a));
  }
}

void validate_measures(const std::vector<MeasureKind>& measures) {
  if (measures.empty()) throw Error(ErrorKind::ConfigError, "measures: must be nonempty");
  std::set<MeasureKind> seen;
  for (MeasureKind m : measures)
    if (!seen.insert(m).second)
      throw Error(ErrorKind::ConfigError,
                  "measures: duplicate measure " + std::string(ascii_name(m)));
}

// Whether a measure is defined at all for samples of size n; used by the
// size sweep to skip rather than record every repetition as excluded.
bool defined_at(MeasureKind m, std::size_t n) {
  switch (m) {
    case MeasureKind::AbsPearson:
    case MeasureKind::AbsSpearman: return n >= 2;
    case MeasureKind::MaxCorr: return n >= 5;
    case MeasureKind::DistCorr: return n > 4;
    case MeasureKind::R1:
    case MeasureKind::MIC: return n >= 8;
  }
  return false;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw Error(ErrorKind::ConfigError, "repetitions: must be >= 1");
  if (cfg.sweep.empty()) throw Error(ErrorKind::ConfigError, "sweep: must be nonempty");
  for (const auto& p : cfg.sweep) {
    if (!std::isfinite(p.sigma) || p.sigma < 0.0)
      throw Error(ErrorKind::ConfigError, "sigma: must be finite and >= 0, got " + fmt_real(p.sigma));
    if (p.n < 1) throw Error(ErrorKind::ConfigError, "n: must be >= 1");
  }
  validate_measures(cfg.measures);
  validate_alphas(cfg.alpha_levels, false);
  if (!(cfg.settings.mic.alpha > 0.0 && cfg.settings.mic.alpha <= 1.0))
    throw Error(ErrorKind::ConfigError, "mic_alpha: must lie in (0, 1]");
  if (cfg.settings.mic.clump_factor < 1)
    throw Error(ErrorKind::ConfigError, "mic_c: must be a positive integer");
  if (!(cfg.settings.ace.tol > 0.0)) throw Error(ErrorKind::ConfigError, "ace_tol: must be > 0");
  if (cfg.settings.ace.max_iter < 1) throw Error(ErrorKind::ConfigError, "ace_max_iter: must be >= 1");
}

std::uint64_t average_stream_id(ModelKind kind, Marginal marginal, const SweepPoint& p) {
  return experiment_id("average/" + std::string(to_string(kind)) + "/" +
                       std::string(to_string(marginal)) + "/" + point_tag(p));
}

std::uint64_t null_stream_id(Marginal marginal, std::size_t n) {
  return experiment_id("null/" + std::string(to_string(marginal)) + "/n=" + std::to_string(n));
}

std::uint64_t power_stream_id(ModelKind kind, Marginal marginal, const SweepPoint& p) {
  return experiment_id("power/" + std::string(to_string(kind)) + "/" +
                       std::string(to_string(marginal)) + "/" + point_tag(p));
}

std::uint64_t equitability_stream_id(FunctionKind fn, double sigma, std::size_t n) {
  return experiment_id("equitability/" + std::string(to_string(fn)) + "/" +
                       point_tag(SweepPoint{sigma, n}));
}

std::vector<MeasureRow> run_repetitions(const ModelSpec& spec, std::uint64_t master_seed,
                                        std::uint64_t stream, std::size_t reps,
                                        const std::vector<MeasureKind>& measures,
                                        const MeasureSettings& settings, std::size_t threads) {
  return parallel_map<MeasureRow>(reps, resolve_threads(threads), [&](std::size_t rep) {
    ModelSpec s = spec;
    s.seed = stream_seed(master_seed, stream, rep);
    return evaluate_measures(measures, generate(s), settings);
  });
}

std::vector<AverageRow> average_values(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<ModelKind> models = cfg.models;
  if (models.empty()) models.push_back(cfg.model.kind);
  std::vector<AverageRow> out;
  for (ModelKind kind : models) {
    for (const auto& p : cfg.sweep) {
      ModelSpec spec = cfg.model;
      spec.kind = kind;
      spec.sigma = p.sigma;
      spec.n = p.n;
      const auto rows = run_repetitions(spec, cfg.master_seed,
                                        average_stream_id(kind, spec.marginal, p),
                                        cfg.repetitions, cfg.measures, cfg.settings, cfg.threads);
      AverageRow row;
      row.model = kind;
      row.point = p;
      for (MeasureKind m : cfg.measures) {
        MeasureSummary sum;
        double total = 0.0;
        for (const auto& r : rows) {
          const auto& o = r[index_of(m)];
          if (o.value) {
            total += *o.value;
            ++sum.valid;
          } else {
            ++sum.excluded;
          }
        }
        sum.mean = sum.valid > 0 ? total / static_cast<double>(sum.valid) : kNaN;
        row.cells[index_of(m)] = sum;
      }
      out.push_back(row);
    }
  }
  return out;
}

bool CriticalValueTable::has(MeasureKind m, double alpha) const {
  const auto& t = thresholds[index_of(m)];
  if (t.empty()) return false;
  return std::find(alphas.begin(), alphas.end(), alpha) != alphas.end();
}

double CriticalValueTable::threshold(MeasureKind m, double alpha) const {
  const auto& t = thresholds[index_of(m)];
  const auto it = std::find(alphas.begin(), alphas.end(), alpha);
  if (t.empty() || it == alphas.end())
    throw Error(ErrorKind::MissingThreshold, "no critical value for " +
                                                 std::string(ascii_name(m)) + " at alpha " +
                                                 fmt_real(alpha));
  return t[static_cast<std::size_t>(it - alphas.begin())];
}

double upper_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "upper_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  // The small offset keeps products like 0.95 * 1000 from rounding up past
  // an exact integer.
  double k = std::ceil((1.0 - alpha) * m - 1e-9);
  k = std::clamp(k, 1.0, m);
  return values[static_cast<std::size_t>(k) - 1];
}

CriticalValueTable critical_values(const ModelSpec& null_spec, std::size_t repetitions,
                                   const std::vector<double>& alphas,
                                   const std::vector<MeasureKind>& measures,
                                   const MeasureSettings& settings, std::size_t threads) {
  if (null_spec.kind != ModelKind::IndependentNull)
    throw Error(ErrorKind::InvalidArgument, "critical_values: null_spec must be IndependentNull");
  validate_alphas(alphas, true);
  validate_measures(measures);
  const double min_alpha = *std::min_element(alphas.begin(), alphas.end());
  const auto needed = static_cast<std::size_t>(std::ceil(1.0 / min_alpha - 1e-9));
  if (repetitions < needed)
    throw Error(ErrorKind::InsufficientRepetitions,
                std::to_string(repetitions) + " repetitions; alpha " + fmt_real(min_alpha) +
                    " needs at least " + std::to_string(needed));

  const auto rows = run_repetitions(null_spec, null_spec.seed,
                                    null_stream_id(null_spec.marginal, null_spec.n), repetitions,
                                    measures, settings, threads);
  CriticalValueTable table;
  table.alphas = alphas;
  table.measures = measures;
  table.null_spec = null_spec;
  table.repetitions = repetitions;
  for (MeasureKind m : measures) {
    std::vector<double> values;
    for (const auto& r : rows)
      if (const auto& v = r[index_of(m)].value) values.push_back(*v);
    table.excluded[index_of(m)] = repetitions - values.size();
    if (values.size() < needed)
      throw Error(ErrorKind::InsufficientRepetitions,
                  std::string(ascii_name(m)) + ": only " + std::to_string(values.size()) +
                      " valid null repetitions; need " + std::to_string(needed));
    auto& t = table.thresholds[index_of(m)];
    for (double a : alphas) t.push_back(upper_quantile(values, a));
  }
  return table;
}

PowerPoint estimate_power(const ModelSpec& dep_spec, const CriticalValueTable& crit, double alpha,
                          std::size_t repetitions, const std::vector<MeasureKind>& measures,
                          const MeasureSettings& settings, std::size_t threads) {
  std::array<double, kMeasureCount> thr{};
  for (MeasureKind m : measures) thr[index_of(m)] = crit.threshold(m, alpha);
  if (repetitions < 1) throw Error(ErrorKind::InvalidArgument, "estimate_power: repetitions < 1");

  const SweepPoint p{dep_spec.sigma, dep_spec.n};
  const auto rows =
      run_repetitions(dep_spec, dep_spec.seed, power_stream_id(dep_spec.kind, dep_spec.marginal, p),
                      repetitions, measures, settings, threads);
  PowerPoint out;
  for (MeasureKind m : measures) {
    const std::size_t i = index_of(m);
    for (const auto& r : rows) {
      if (const auto& v = r[i].value) {
        ++out.valid[i];
        if (*v > thr[i]) ++out.exceed[i];
      } else {
        ++out.excluded[i];
      }
    }
    if (out.valid[i] > 0)
      out.power[i] = static_cast<double>(out.exceed[i]) / static_cast<double>(out.valid[i]);
  }
  return out;
}

std::vector<PowerCurve> power_sweep(const ExperimentConfig& cfg, const CriticalValueTable& crit,
                                    double alpha) {
  validate(cfg);
  std::vector<PowerCurve> curves;
  for (MeasureKind m : cfg.measures) {
    crit.threshold(m, alpha);  // fail before any work
    PowerCurve c;
    c.measure = m;
    c.abscissa_name = "sigma";
    curves.push_back(c);
  }
  for (const auto& p : cfg.sweep) {
    ModelSpec spec = cfg.model;
    spec.sigma = p.sigma;
    spec.n = p.n;
    spec.seed = cfg.master_seed;
    const PowerPoint pt =
        estimate_power(spec, crit, alpha, cfg.repetitions, cfg.measures, cfg.settings, cfg.threads);
    for (auto& c : curves) {
      const std::size_t i = index_of(c.measure);
      c.abscissa.push_back(p.sigma);
      c.power.push_back(pt.power[i].value_or(kNaN));
      c.exceed.push_back(pt.exceed[i]);
      c.valid.push_back(pt.valid[i]);
    }
  }
  return curves;
}

std::vector<PowerCurve> size_sweep_power(const std::vector<std::size_t>& n_values, double alpha,
                                         std::size_t repetitions, std::uint64_t master_seed,
                                         const std::vector<MeasureKind>& measures,
                                         const MeasureSettings& settings, std::size_t threads) {
  if (n_values.empty()) throw Error(ErrorKind::ConfigError, "n_values: must be nonempty");
  validate_measures(measures);
  validate_alphas({alpha}, false);
  std::vector<PowerCurve> curves;
  for (MeasureKind m : measures) {
    PowerCurve c;
    c.measure = m;
    c.abscissa_name = "n";
    curves.push_back(c);
  }
  for (std::size_t n : n_values) {
    std::vector<MeasureKind> active;
    for (MeasureKind m : measures)
      if (defined_at(m, n)) active.push_back(m);
    PowerPoint pt;
    if (!active.empty()) {
      ModelSpec null_spec;
      null_spec.kind = ModelKind::IndependentNull;
      null_spec.n = n;
      null_spec.seed = master_seed;
      const auto crit = critical_values(null_spec, repetitions, {alpha}, active, settings, threads);
      ModelSpec dep;
      dep.kind = ModelKind::Linear;
      dep.sigma = 1.0;
      dep.n = n;
      dep.seed = master_seed;
      pt = estimate_power(dep, crit, alpha, repetitions, active, settings, threads);
    }
    for (auto& c : curves) {
      const std::size_t i = index_of(c.measure);
      c.abscissa.push_back(static_cast<double>(n));
      c.power.push_back(pt.power[i].value_or(kNaN));
      c.exceed.push_back(pt.exceed[i]);
      c.valid.push_back(pt.valid[i]);
    }
  }
  return curves;
}

double r_squared(const PairedSample& s, FunctionKind fn) {
  std::vector<double> fx(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) fx[i] = apply_function(fn, s.x[i]);
  const double r = pearson(fx, s.y);
  return r * r;
}

double function_variance(FunctionKind fn) {
  // Midpoint rule on [-12, 12]; the midpoint nodes avoid the jump of f6 at 0
  // and the log singularity of f2 at -5.
  constexpr int kNodes = 2'400'000;
  constexpr double lo = -12.0, hi = 12.0;
  const double h = (hi - lo) / kNodes;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI);
  long double m1 = 0.0L, m2 = 0.0L;
  for (int i = 0; i < kNodes; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double w = norm * std::exp(-0.5 * x * x) * h;
    const double f = apply_function(fn, x);
    m1 += w * f;
    m2 += w * f * f;
  }
  return static_cast<double>(m2 - m1 * m1);
}

double sigma_for_noise(FunctionKind fn, double noise) {
  if (!(noise >= 0.0 && noise < 1.0))
    throw Error(ErrorKind::InvalidArgument, "noise level must lie in [0, 1)");
  return std::sqrt(function_variance(fn) * noise / (1.0 - noise));
}

std::vector<double> equitability_sigmas(const EquitabilityConfig& cfg, FunctionKind fn) {
  if (!cfg.sigmas.empty()) return cfg.sigmas;
  const double var = function_variance(fn);
  std::vector<double> out;
  for (double noise : cfg.noise_levels) {
    if (!(noise >= 0.0 && noise < 1.0))
      throw Error(ErrorKind::ConfigError, "noise_levels: " + fmt_real(noise) + " outside [0, 1)");
    out.push_back(std::sqrt(var * noise / (1.0 - noise)));
  }
  return out;
}

std::vector<EquitabilityRecord> equitability_scan(const EquitabilityConfig& cfg) {
  if (cfg.functions.empty()) throw Error(ErrorKind::ConfigError, "functions: must be nonempty");
  if (cfg.sigmas.empty() && cfg.noise_levels.empty())
    throw Error(ErrorKind::ConfigError, "noise_levels: must be nonempty");
  if (cfg.repetitions < 1) throw Error(ErrorKind::ConfigError, "repetitions: must be >= 1");
  if (cfg.n < 1) throw Error(ErrorKind::ConfigError, "n: must be >= 1");
  for (double s : cfg.sigmas)
    if (!std::isfinite(s) || s < 0.0)
      throw Error(ErrorKind::ConfigError, "sigma: must be finite and >= 0, got " + fmt_real(s));
  validate_measures(cfg.measures);

  std::vector<EquitabilityRecord> out;
  for (FunctionKind fn : cfg.functions) {
    for (double sigma : equitability_sigmas(cfg, fn)) {
      const std::uint64_t stream = equitability_stream_id(fn, sigma, cfg.n);
      auto recs = parallel_map<EquitabilityRecord>(
          cfg.repetitions, resolve_threads(cfg.threads), [&](std::size_t rep) {
            ModelSpec spec;
            spec.kind = model_of(fn);
            spec.sigma = sigma;
            spec.n = cfg.n;
            spec.seed = stream_seed(cfg.master_seed, stream, rep);
            const PairedSample s = generate(spec);
            EquitabilityRecord rec;
            rec.function = fn;
            rec.sigma = sigma;
            rec.repetition = rep;
            try {
              rec.noise = 1.0 - r_squared(s, fn);
            } catch (const Error&) {
              rec.noise = kNaN;
            }
            const MeasureRow row = evaluate_measures(cfg.measures, s, cfg.settings);
            for (MeasureKind m : cfg.measures) rec.values[index_of(m)] = row[index_of(m)].value;
            return rec;
          });
      out.insert(out.end(), recs.begin(), recs.end());
    }
  }
  return out;
}

std::vector<SpreadRow> equitability_spreads(const std::vector<EquitabilityRecord>& records,
                                            const std::vector<MeasureKind>& measures,
                                            double bin_width) {
  if (!(bin_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "bin_width must be > 0");
  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  // bin -> function -> measure accumulators
  std::map<long, std::map<FunctionKind, std::array<Acc, kMeasureCount>>> bins;
  for (const auto& r : records) {
    if (!std::isfinite(r.noise)) continue;
    const long b = static_cast<long>(std::floor(r.noise / bin_width));
    auto& acc = bins[b][r.function];
    for (MeasureKind m : measures) {
      if (const auto& v = r.values[index_of(m)]) {
        acc[index_of(m)].sum += *v;
        ++acc[index_of(m)].count;
      }
    }
  }
  std::vector<SpreadRow> out;
  for (const auto& [b, fns] : bins) {
    SpreadRow row;
    row.bin_lo = static_cast<double>(b) * bin_width;
    row.bin_hi = static_cast<double>(b + 1) * bin_width;
    row.functions = fns.size();
    for (MeasureKind m : measures) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& [fn, acc] : fns) {
        const Acc& a = acc[index_of(m)];
        if (a.count == 0) continue;
        const double mean = a.sum / static_cast<double>(a.count);
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
      }
      if (hi >= lo) row.range[index_of(m)] = hi - lo;
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace depmet
