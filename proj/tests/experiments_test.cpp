#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "depmet/error.hpp"
#include "depmet/experiments.hpp"
#include "depmet/parallel.hpp"

using namespace depmet;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no depmet::Error thrown";
  return ErrorKind::InvalidArgument;
}

ModelSpec null_spec(std::size_t n, std::uint64_t seed) {
  ModelSpec s;
  s.kind = ModelKind::IndependentNull;
  s.n = n;
  s.seed = seed;
  return s;
}

const std::vector<MeasureKind> kCheap{MeasureKind::AbsPearson, MeasureKind::AbsSpearman,
                                      MeasureKind::DistCorr, MeasureKind::R1};

}  // namespace

TEST(Parallel, ResultsInIndexOrder) {
  for (std::size_t threads : {1u, 2u, 7u}) {
    const auto v = parallel_map<std::size_t>(100, threads, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(v[i], i * i);
  }
  EXPECT_THROW(parallel_map<int>(10, 3, [](std::size_t i) -> int {
                 if (i == 5) throw std::runtime_error("boom");
                 return 0;
               }),
               std::runtime_error);
  EXPECT_EQ(resolve_threads(3), 3u);
  EXPECT_GE(resolve_threads(0), 1u);
}

TEST(UpperQuantile, OrderStatisticConvention) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(upper_quantile(v, 0.05), 95.0);
  EXPECT_EQ(upper_quantile(v, 0.01), 99.0);
  EXPECT_EQ(upper_quantile(v, 0.10), 90.0);
  EXPECT_EQ(upper_quantile(v, 0.001), 100.0);
  EXPECT_EQ(upper_quantile(v, 1.0), 1.0);  // alpha = 100%: the minimum
  std::vector<double> w(1000);
  std::iota(w.begin(), w.end(), 1.0);
  EXPECT_EQ(upper_quantile(w, 0.05), 950.0);
}

TEST(CriticalValues, Preconditions) {
  EXPECT_EQ(kind_of([] { critical_values(null_spec(50, 1), 99, {0.01}, kCheap); }),
            ErrorKind::InsufficientRepetitions);
  ModelSpec lin;
  lin.n = 50;
  EXPECT_EQ(kind_of([&] { critical_values(lin, 100, {0.05}, kCheap); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { critical_values(null_spec(50, 1), 100, {0.0}, kCheap); }),
            ErrorKind::ConfigError);
}

TEST(CriticalValues, MonotoneInAlphaAndEndpoint) {
  const auto crit = critical_values(null_spec(100, 3), 200, {0.01, 0.05, 0.10, 1.0}, kCheap);
  EXPECT_EQ(crit.repetitions, 200u);
  EXPECT_EQ(crit.null_spec.n, 100u);
  for (MeasureKind m : kCheap) {
    EXPECT_GE(crit.threshold(m, 0.01), crit.threshold(m, 0.05));
    EXPECT_GE(crit.threshold(m, 0.05), crit.threshold(m, 0.10));
    EXPECT_GE(crit.threshold(m, 0.10), crit.threshold(m, 1.0));
  }
  // Recompute the minimum by hand from the same null stream.
  const auto rows = run_repetitions(null_spec(100, 3), 3, null_stream_id(Marginal::StandardNormal, 100),
                                    200, {MeasureKind::AbsPearson}, {});
  double lo = 1;
  for (const auto& r : rows) lo = std::min(lo, *r[0].value);
  EXPECT_EQ(crit.threshold(MeasureKind::AbsPearson, 1.0), lo);
  EXPECT_FALSE(crit.has(MeasureKind::MIC, 0.05));
  EXPECT_EQ(kind_of([&] { crit.threshold(MeasureKind::MIC, 0.05); }), ErrorKind::MissingThreshold);
  EXPECT_EQ(kind_of([&] { crit.threshold(MeasureKind::AbsPearson, 0.2); }), ErrorKind::MissingThreshold);
}

TEST(Power, StrictInequalityAndExactFractions) {
  CriticalValueTable crit;
  crit.alphas = {0.05};
  crit.measures = {MeasureKind::AbsPearson};
  crit.thresholds[index_of(MeasureKind::AbsPearson)] = {1.0};
  ModelSpec lin;
  lin.n = 50;
  lin.seed = 1;
  // |r| is exactly 1 on a noiseless line, which does not exceed a threshold of 1.
  const auto p = estimate_power(lin, crit, 0.05, 30, {MeasureKind::AbsPearson});
  EXPECT_EQ(*p.power[0], 0.0);

  const auto real = critical_values(null_spec(60, 2), 100, {0.05}, kCheap);
  ModelSpec dep;
  dep.kind = ModelKind::Linear;
  dep.sigma = 3.0;
  dep.n = 60;
  dep.seed = 4;
  const auto q = estimate_power(dep, real, 0.05, 40, kCheap);
  for (MeasureKind m : kCheap) {
    const auto i = index_of(m);
    ASSERT_TRUE(q.power[i]);
    EXPECT_EQ(*q.power[i], static_cast<double>(q.exceed[i]) / static_cast<double>(q.valid[i]));
    EXPECT_EQ(q.valid[i] + q.excluded[i], 40u);
  }
  EXPECT_EQ(kind_of([&] { estimate_power(dep, real, 0.05, 10, {MeasureKind::MaxCorr}); }),
            ErrorKind::MissingThreshold);
}

TEST(Averages, LinearNoiseless) {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::Linear;
  cfg.sweep = {{0.0, 300}};
  cfg.repetitions = 10;
  cfg.measures = {MeasureKind::AbsPearson, MeasureKind::AbsSpearman};
  const auto rows = average_values(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].cells[0]->mean, 1.0, 1e-12);
  EXPECT_EQ(rows[0].cells[0]->valid, 10u);
  EXPECT_FALSE(rows[0].cells[index_of(MeasureKind::MIC)].has_value());
}

TEST(Averages, ExcludedRepetitionsAreCounted) {
  ExperimentConfig cfg;
  cfg.sweep = {{1.0, 6}};
  cfg.repetitions = 5;
  const auto rows = average_values(cfg);
  const auto& r1 = *rows[0].cells[index_of(MeasureKind::R1)];
  EXPECT_EQ(r1.valid, 0u);
  EXPECT_EQ(r1.excluded, 5u);
  EXPECT_TRUE(std::isnan(r1.mean));
  EXPECT_EQ(rows[0].cells[index_of(MeasureKind::DistCorr)]->valid, 5u);
}

TEST(Averages, ConfigValidation) {
  ExperimentConfig cfg;
  cfg.repetitions = 0;
  EXPECT_EQ(kind_of([&] { average_values(cfg); }), ErrorKind::ConfigError);
  cfg.repetitions = 1;
  cfg.sweep = {{-1.0, 10}};
  EXPECT_EQ(kind_of([&] { average_values(cfg); }), ErrorKind::ConfigError);
  cfg.sweep = {{1.0, 10}};
  cfg.alpha_levels = {0.05, 0.05};
  EXPECT_EQ(kind_of([&] { average_values(cfg); }), ErrorKind::ConfigError);
}

TEST(Averages, IdenticalAcrossWorkerCounts) {
  ExperimentConfig cfg;
  cfg.models = {ModelKind::Circular, ModelKind::Cross};
  cfg.sweep = {{0.5, 120}};
  cfg.repetitions = 12;
  cfg.master_seed = 99;
  cfg.threads = 1;
  const auto a = average_values(cfg);
  cfg.threads = 4;
  const auto b = average_values(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (MeasureKind m : kAllMeasures) EXPECT_EQ(a[r].cells[index_of(m)]->mean, b[r].cells[index_of(m)]->mean);
}

TEST(PowerSweep, ShapeAndDeterminism) {
  const auto crit = critical_values(null_spec(80, 1), 100, {0.05}, kCheap);
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::Linear;
  cfg.sweep = {{0.5, 80}, {2.0, 80}, {8.0, 80}};
  cfg.repetitions = 30;
  cfg.measures = kCheap;
  cfg.threads = 1;
  const auto a = power_sweep(cfg, crit, 0.05);
  cfg.threads = 3;
  const auto b = power_sweep(cfg, crit, 0.05);
  ASSERT_EQ(a.size(), kCheap.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].power, b[k].power);
    EXPECT_EQ(a[k].abscissa, (std::vector<double>{0.5, 2.0, 8.0}));
    for (double p : a[k].power) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
  EXPECT_EQ(a[0].power[0], 1.0);  // |r| at sigma 0.5, n 80
}

TEST(SizeSweep, SkipsUndefinedMeasures) {
  const auto curves = size_sweep_power({4, 12}, 0.05, 40, 5,
                                       {MeasureKind::AbsPearson, MeasureKind::DistCorr, MeasureKind::R1,
                                        MeasureKind::MaxCorr});
  ASSERT_EQ(curves.size(), 4u);
  EXPECT_FALSE(std::isnan(curves[0].power[0]));  // |r| at n = 4
  EXPECT_TRUE(std::isnan(curves[1].power[0]));   // dcor needs n > 4
  EXPECT_TRUE(std::isnan(curves[2].power[0]));   // r1 needs n >= 8
  EXPECT_TRUE(std::isnan(curves[3].power[0]));   // ACE needs n >= 5
  for (const auto& c : curves) EXPECT_FALSE(std::isnan(c.power[1]));
  EXPECT_EQ(curves[0].abscissa, (std::vector<double>{4, 12}));
}

TEST(RSquared, ExamplesAndPopulationValues) {
  const auto exact = generate({ModelKind::Cubic, 0.0, 200, Marginal::StandardNormal, 1});
  EXPECT_NEAR(r_squared(exact, FunctionKind::Cubic), 1.0, 1e-12);
  double m1 = 0, m3 = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    m1 += r_squared(generate({ModelKind::Linear, 1.0, 1000, Marginal::StandardNormal, seed}), FunctionKind::Linear);
    m3 += r_squared(generate({ModelKind::Linear, 3.0, 1000, Marginal::StandardNormal, seed}), FunctionKind::Linear);
  }
  EXPECT_NEAR(m1 / 20, 0.5, 0.03);
  EXPECT_NEAR(m3 / 20, 0.1, 0.02);
  EXPECT_THROW(r_squared(PairedSample({0.1, 0.2, 0.3}, {1, 2, 3}), FunctionKind::Piecewise), Error);
}

TEST(Equitability, FunctionVariance) {
  EXPECT_NEAR(function_variance(FunctionKind::Linear), 1.0, 1e-6);
  EXPECT_NEAR(function_variance(FunctionKind::Quadratic), 0.49 * 2.0, 1e-6);
  EXPECT_NEAR(function_variance(FunctionKind::Cubic), 0.09 * 15.0, 1e-6);
  EXPECT_NEAR(function_variance(FunctionKind::Sinusoidal), 1.69 * (1 - std::exp(-18.0)) / 2, 1e-6);
  EXPECT_NEAR(sigma_for_noise(FunctionKind::Linear, 0.5), 1.0, 1e-6);
  EXPECT_EQ(sigma_for_noise(FunctionKind::Cubic, 0.0), 0.0);
  EXPECT_THROW(sigma_for_noise(FunctionKind::Linear, 1.0), Error);
}

TEST(Equitability, ScanRecordsAndSpreads) {
  EquitabilityConfig cfg;
  cfg.functions = {FunctionKind::Linear, FunctionKind::Quadratic};
  cfg.noise_levels = {0.0, 0.5};
  cfg.n = 300;
  cfg.repetitions = 3;
  cfg.measures = {MeasureKind::MaxCorr, MeasureKind::R1};
  const auto recs = equitability_scan(cfg);
  ASSERT_EQ(recs.size(), 12u);
  for (const auto& r : recs) {
    if (r.sigma == 0.0) {
      EXPECT_NEAR(r.noise, 0.0, 1e-12);
      EXPECT_GE(*r.values[index_of(MeasureKind::MaxCorr)], 0.97);
    } else {
      EXPECT_NEAR(r.noise, 0.5, 0.15);
    }
    EXPECT_FALSE(r.values[index_of(MeasureKind::MIC)].has_value());
  }
  EXPECT_EQ(recs, equitability_scan(cfg));
}

TEST(Equitability, SpreadBinning) {
  std::vector<EquitabilityRecord> recs;
  auto add = [&](FunctionKind f, double noise, double v) {
    EquitabilityRecord r;
    r.function = f;
    r.noise = noise;
    r.values[index_of(MeasureKind::R1)] = v;
    recs.push_back(r);
  };
  add(FunctionKind::Linear, 0.46, 0.5);
  add(FunctionKind::Linear, 0.47, 0.7);   // Linear mean 0.6
  add(FunctionKind::Cubic, 0.49, 0.4);
  add(FunctionKind::Sinusoidal, 0.51, 0.9);  // next bin
  const auto rows = equitability_spreads(recs, {MeasureKind::R1}, 0.05);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].bin_lo, 0.45, 1e-12);
  EXPECT_EQ(rows[0].functions, 2u);
  EXPECT_NEAR(*rows[0].range[index_of(MeasureKind::R1)], 0.2, 1e-12);
  EXPECT_EQ(rows[1].functions, 1u);
  EXPECT_NEAR(*rows[1].range[index_of(MeasureKind::R1)], 0.0, 1e-12);
}
