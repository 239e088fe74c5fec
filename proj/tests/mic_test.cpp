#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numeric>
#include <random>

#include "depmet/error.hpp"
#include "depmet/measures.hpp"
#include "depmet/mic.hpp"
#include "depmet/models.hpp"
#include "oracles.hpp"

using namespace depmet;

namespace {

PairedSample small_sample(std::mt19937_64& gen, std::size_t n, int style) {
  std::normal_distribution<double> nd;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = nd(gen);
    switch (style % 4) {
      case 0: y[i] = nd(gen); break;
      case 1: y[i] = x[i] * x[i] + 0.3 * nd(gen); break;
      case 2: y[i] = std::round(nd(gen)); x[i] = std::round(2 * x[i]); break;  // heavy ties
      default: y[i] = std::sin(3 * x[i]) + 0.1 * nd(gen); break;
    }
  }
  return PairedSample(x, y);
}

}  // namespace

TEST(Equipartition, Examples) {
  std::vector<double> ten(10);
  std::iota(ten.begin(), ten.end(), 1.0);
  const auto r = equipartition_axis(ten, 2);
  EXPECT_EQ(std::count(r.begin(), r.end(), 0), 5);
  EXPECT_EQ(std::count(r.begin(), r.end(), 1), 5);

  EXPECT_EQ(equipartition_axis(std::vector<double>{1, 1, 1, 2}, 2), (std::vector<int>{0, 0, 0, 1}));

  std::vector<double> nine(9);
  std::iota(nine.begin(), nine.end(), 1.0);
  EXPECT_EQ(equipartition_axis(nine, 3), (std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2, 2}));

  EXPECT_THROW(equipartition_axis(std::vector<double>{4, 4, 4}, 2), Error);
}

TEST(Equipartition, NeverSplitsTies) {
  std::mt19937_64 gen(10);
  std::uniform_int_distribution<int> d(0, 6);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(40);
    for (auto& x : v) x = d(gen);
    std::sort(v.begin(), v.end());
    const auto rows = equipartition_axis(v, 2 + t % 4);
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] == v[i - 1]) {
        ASSERT_EQ(rows[i], rows[i - 1]);
      }
      ASSERT_GE(rows[i], rows[i - 1]);
    }
  }
}

TEST(OptimizeXAxis, DiagonalGivesLogK) {
  for (int k : {2, 3, 4, 5}) {
    const int n = 6 * k;
    std::vector<int> rows(n), clumps(n);
    for (int i = 0; i < n; ++i) rows[i] = clumps[i] = i / 6;
    const auto best = optimize_x_axis(clumps, rows, k, k);
    EXPECT_NEAR(best[static_cast<std::size_t>(k - 2)], std::log(k), 1e-12);
  }
}

TEST(OptimizeXAxis, MatchesBruteForceEnumeration) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 60; ++t) {
    const int n = 6 + t % 5;
    const int q = 2 + t % 3;
    std::uniform_int_distribution<int> row(0, q - 1);
    std::vector<int> rows(n), clumps(n);
    int id = 0;
    for (int i = 0; i < n; ++i) {
      rows[i] = row(gen);
      if (i > 0 && (gen() % 3 != 0)) ++id;  // some clumps span several points
      clumps[i] = id;
    }
    const int max_cols = 2 + t % 4;
    const auto best = optimize_x_axis(clumps, rows, q, max_cols);
    for (int l = 2; l <= max_cols; ++l)
      EXPECT_NEAR(best[static_cast<std::size_t>(l - 2)], oracle::best_column_mi(clumps, rows, l), 1e-12)
          << "case " << t << " l=" << l;
  }
}

TEST(OptimizeXAxis, ProductPatternHasNoInformation) {
  // Each clump holds one point of each row, so any cut set yields a product table.
  std::vector<int> rows, clumps;
  for (int c = 0; c < 6; ++c) {
    rows.push_back(0);
    rows.push_back(1);
    clumps.push_back(c);
    clumps.push_back(c);
  }
  for (double v : optimize_x_axis(clumps, rows, 2, 5)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Oracle, Examples) {
  const PairedSample diag({1, 2, 3, 4}, {1, 2, 3, 4});
  EXPECT_NEAR(mic_exhaustive_oracle(diag, 4), 1.0, 1e-12);

  // (1,1),(2,2),(3,1),(4,2): the only 2x2 grids cut x after 1, 2 or 3.
  const PairedSample checker({1, 2, 3, 4}, {1, 2, 1, 2});
  const std::vector<int> rows{0, 1, 0, 1};
  double expect = 0;
  for (int cut = 1; cut <= 3; ++cut) {
    std::vector<int> cols{0, 0, 0, 0};
    for (int i = cut; i < 4; ++i) cols[i] = 1;
    expect = std::max(expect, oracle::mutual_info_labels(cols, rows) / std::log(2.0));
  }
  EXPECT_NEAR(mic_exhaustive_oracle(checker, 4), expect, 1e-12);

  EXPECT_EQ(mic_exhaustive_oracle(PairedSample({1, 2, 3, 4, 5}, {7, 7, 7, 7, 7}), 9), 0.0);
  EXPECT_THROW(mic_exhaustive_oracle(PairedSample(std::vector<double>(13, 1.0), std::vector<double>(13, 1.0)), 9),
               Error);
  EXPECT_THROW(mic_exhaustive_oracle(diag, 10), Error);
}

TEST(Mic, MatchesExhaustiveOracle) {
  std::mt19937_64 gen(12);
  MicConfig cfg;
  cfg.cell_bound = 9;
  for (int t = 0; t < 30; ++t) {
    const auto s = small_sample(gen, 8 + static_cast<std::size_t>(t % 5), t);
    EXPECT_NEAR(mic(s, cfg), mic_exhaustive_oracle(s, 9), 1e-12) << "sample " << t;
  }
}

TEST(Mic, CellBound) {
  EXPECT_DOUBLE_EQ(mic_cell_bound(1, {}), 4.0);
  EXPECT_DOUBLE_EQ(mic_cell_bound(10, {}), 4.0);
  EXPECT_NEAR(mic_cell_bound(1000, {}), std::pow(1000.0, 0.6), 1e-9);
  MicConfig c;
  c.cell_bound = 9;
  EXPECT_DOUBLE_EQ(mic_cell_bound(1000, c), 9.0);
}

TEST(Mic, NoiselessModels) {
  EXPECT_GE(mic(generate({ModelKind::Linear, 0.0, 1000, Marginal::StandardNormal, 1})), 0.999);
  EXPECT_GE(mic(generate({ModelKind::Sinusoidal, 0.0, 1000, Marginal::StandardNormal, 1})), 0.99);
}

TEST(Mic, NullQuantile) {
  int above = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed)
    if (mic(generate({ModelKind::IndependentNull, 0.0, 1000, Marginal::StandardNormal, seed})) >= 0.147)
      ++above;
  std::printf("MIC >= 0.147 in %d of 400 null samples\n", above);
  // 0.147 is itself an estimated 95% null quantile, so the exceedance count
  // is binomial around 5%; allow two standard deviations.
  EXPECT_LE(above / 400.0, 0.05 + 2 * std::sqrt(0.05 * 0.95 / 400));
}

TEST(Mic, SymmetricAndRankInvariant) {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 8; ++t) {
    const auto s = small_sample(gen, 150, t);
    const double v = mic(s);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, mic(s.swapped()));
    std::vector<double> x2(s.x), y2(s.y);
    for (auto& a : x2) a = std::exp(a);
    for (auto& b : y2) b = 3 * b * b * b + 1;
    EXPECT_EQ(mic(PairedSample(x2, y2)), v);
  }
}

TEST(Mic, RefinementIsMonotone) {
  const auto s = generate({ModelKind::Circular, 0.5, 300, Marginal::StandardNormal, 3});
  const auto m = characteristic_matrix(s);
  double prev = 0;
  for (double limit = 4; limit <= m.bound(); limit += 1) {
    const double v = m.max(limit);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_EQ(prev, mic(s));
}

TEST(Mic, ConstantAxisAndErrors) {
  EXPECT_EQ(mic(PairedSample({1, 2, 3, 4, 5, 6, 7, 8}, std::vector<double>(8, 2.0))), 0.0);
  try {
    mic(PairedSample({1, 2, 3, 4, 5, 6, 7}, {1, 2, 3, 4, 5, 6, 7}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewObservations);
  }
  MicConfig bad;
  bad.alpha = 0.0;
  EXPECT_THROW(mic(generate({ModelKind::Linear, 0.0, 20, Marginal::StandardNormal, 1}), bad), Error);
}

TEST(Mic, ApproximateModeStillSane) {
  MicConfig cfg;
  cfg.exact_budget = 0;
  const auto s = generate({ModelKind::Linear, 0.0, 200, Marginal::StandardNormal, 5});
  EXPECT_GE(mic(s, cfg), 0.999);
}
