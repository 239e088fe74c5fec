#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depmet/measure_kind.hpp"
#include "depmet/models.hpp"

namespace depmet {

struct SweepPoint {
  double sigma = 0.0;
  std::size_t n = 1000;
};

struct ExperimentConfig {
  /// Template: kind and marginal are used; sigma, n and seed come from the
  /// sweep and the repetition stream.
  ModelSpec model;
  /// When nonempty, the experiment runs over these models instead of
  /// model.kind (one row per model).
  std::vector<ModelKind> models;
  std::vector<SweepPoint> sweep{SweepPoint{}};
  std::size_t repetitions = 200;
  std::vector<MeasureKind> measures{kAllMeasures.begin(), kAllMeasures.end()};
  std::uint64_t master_seed = 1;
  std::vector<double> alpha_levels{0.01, 0.05, 0.10};
  MeasureSettings settings;
  /// 0 defers to DEPMET_THREADS, then the hardware.
  std::size_t threads = 0;
};

/// Throws ConfigError on an invalid configuration.
void validate(const ExperimentConfig& cfg);

/// Tag-derived id of the stream family used for one experiment cell.
std::uint64_t average_stream_id(ModelKind kind, Marginal marginal, const SweepPoint& p);
std::uint64_t null_stream_id(Marginal marginal, std::size_t n);
std::uint64_t power_stream_id(ModelKind kind, Marginal marginal, const SweepPoint& p);
std::uint64_t equitability_stream_id(FunctionKind fn, double sigma, std::size_t n);

/// Runs `reps` repetitions of `spec` (seed replaced per repetition by
/// stream_seed(master, stream, rep)) and evaluates the measures on each sample.
std::vector<MeasureRow> run_repetitions(const ModelSpec& spec, std::uint64_t master_seed,
                                        std::uint64_t stream, std::size_t reps,
                                        const std::vector<MeasureKind>& measures,
                                        const MeasureSettings& settings, std::size_t threads = 0);

struct MeasureSummary {
  double mean = 0.0;  // NaN when no repetition produced a value
  std::size_t valid = 0;
  std::size_t excluded = 0;
};

struct AverageRow {
  ModelKind model = ModelKind::Linear;
  SweepPoint point;
  std::array<std::optional<MeasureSummary>, kMeasureCount> cells;  // present for requested measures
};

/// Mean of each measure per (model, sweep point). Repetitions on which a
/// measure raises are excluded from that measure's mean and counted.
std::vector<AverageRow> average_values(const ExperimentConfig& cfg);

struct CriticalValueTable {
  std::vector<double> alphas;
  std::vector<MeasureKind> measures;
  /// thresholds[index_of(m)][a] for alphas[a]; empty for absent measures.
  std::array<std::vector<double>, kMeasureCount> thresholds;
  std::array<std::size_t, kMeasureCount> excluded{};
  ModelSpec null_spec;
  std::size_t repetitions = 0;

  bool has(MeasureKind m, double alpha) const;
  /// Throws MissingThreshold when (m, alpha) was not computed.
  double threshold(MeasureKind m, double alpha) const;
};

/// The k-th order statistic with k = ceil((1 - alpha) M), clamped to [1, M].
double upper_quantile(std::vector<double> values, double alpha);

/// Null thresholds; the null stream is seeded from null_spec.seed.
/// Requires repetitions >= ceil(1 / min alpha) (InsufficientRepetitions).
CriticalValueTable critical_values(const ModelSpec& null_spec, std::size_t repetitions,
                                   const std::vector<double>& alphas,
                                   const std::vector<MeasureKind>& measures,
                                   const MeasureSettings& settings = {}, std::size_t threads = 0);

struct PowerPoint {
  std::array<std::optional<double>, kMeasureCount> power;
  std::array<std::size_t, kMeasureCount> exceed{};
  std::array<std::size_t, kMeasureCount> valid{};
  std::array<std::size_t, kMeasureCount> excluded{};
};

/// Fraction of valid repetitions whose value is strictly above the threshold.
/// The alternative stream is seeded from dep_spec.seed and is disjoint from
/// the null stream.
PowerPoint estimate_power(const ModelSpec& dep_spec, const CriticalValueTable& crit, double alpha,
                          std::size_t repetitions, const std::vector<MeasureKind>& measures,
                          const MeasureSettings& settings = {}, std::size_t threads = 0);

struct PowerCurve {
  MeasureKind measure = MeasureKind::AbsPearson;
  std::string abscissa_name;  // "sigma" or "n"
  std::vector<double> abscissa;
  std::vector<double> power;  // NaN where the measure could not be evaluated
  std::vector<std::size_t> exceed;
  std::vector<std::size_t> valid;
};

/// estimate_power at every sweep point of cfg (model = cfg.model.kind).
std::vector<PowerCurve> power_sweep(const ExperimentConfig& cfg, const CriticalValueTable& crit,
                                    double alpha);

/// Power on the linear model with sigma = 1 for each n, against per-n
/// critical values from fresh null runs. r1 and MIC are skipped for n < 8,
/// dist_corr for n <= 4.
std::vector<PowerCurve> size_sweep_power(const std::vector<std::size_t>& n_values, double alpha,
                                         std::size_t repetitions, std::uint64_t master_seed,
                                         const std::vector<MeasureKind>& measures,
                                         const MeasureSettings& settings = {},
                                         std::size_t threads = 0);

/// pearson(f_j(x), y)^2.
double r_squared(const PairedSample& s, FunctionKind fn);

/// Var f_j(X) for X ~ N(0,1), by numerical quadrature.
double function_variance(FunctionKind fn);

/// Noise sd giving population 1 - R^2 equal to `noise` (in [0, 1)).
double sigma_for_noise(FunctionKind fn, double noise);

struct EquitabilityRecord {
  FunctionKind function = FunctionKind::Linear;
  double sigma = 0.0;
  std::size_t repetition = 0;
  double noise = 0.0;  // 1 - R^2 of this sample; NaN if R^2 was undefined
  std::array<std::optional<double>, kMeasureCount> values;

  bool operator==(const EquitabilityRecord&) const = default;
};

struct EquitabilityConfig {
  std::vector<FunctionKind> functions{std::begin(kAllFunctions), std::end(kAllFunctions)};
  /// Target 1 - R^2 levels, mapped to a per-function sigma. Ignored when
  /// `sigmas` is nonempty, in which case those sigmas are used for every function.
  std::vector<double> noise_levels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> sigmas;
  std::size_t n = 1000;
  std::size_t repetitions = 200;
  std::vector<MeasureKind> measures{kAllMeasures.begin(), kAllMeasures.end()};
  std::uint64_t master_seed = 1;
  MeasureSettings settings;
  std::size_t threads = 0;
};

/// The sigma grid used for `fn`.
std::vector<double> equitability_sigmas(const EquitabilityConfig& cfg, FunctionKind fn);

/// One record per (function, sigma, repetition); R^2 and the coefficients are
/// computed on the same sample.
std::vector<EquitabilityRecord> equitability_scan(const EquitabilityConfig& cfg);

struct SpreadRow {
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  std::size_t functions = 0;  // functions with at least one record in the bin
  /// max - min across functions of the per-function mean value in the bin.
  std::array<std::optional<double>, kMeasureCount> range;
};

/// Bins records by noise (width `bin_width`, bins [k w, (k+1) w)) and reports
/// the cross-function spread of mean values per bin.
std::vector<SpreadRow> equitability_spreads(const std::vector<EquitabilityRecord>& records,
                                            const std::vector<MeasureKind>& measures,
                                            double bin_width = 0.05);

}  // namespace depmet
