#include <gtest/gtest.h>

#include <cmath>

#include "depmet/ace.hpp"
#include "depmet/error.hpp"
#include "depmet/experiments.hpp"
#include "depmet/measures.hpp"
#include "depmet/models.hpp"

using namespace depmet;

TEST(Smoothers, SuperSmootherReproducesLines) {
  std::vector<double> x, y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(i * 0.05);
    y.push_back(2.0 * x.back() - 1.0);
  }
  const auto s = super_smoother(x, y, 5.0);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(s[i], y[i], 1e-9);
}

TEST(Smoothers, TiedAbscissaeShareValues) {
  std::vector<double> x{0, 0, 1, 1, 1, 2, 3, 3, 4, 5, 6, 6, 7, 8, 9, 9, 9, 10, 11, 12};
  std::vector<double> y;
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back(std::sin(static_cast<double>(i)));
  for (const auto& s : {super_smoother(x, y, 0.0), smooth_local_mean(x, y, 0.2)}) {
    for (std::size_t i = 1; i < x.size(); ++i)
      if (x[i] == x[i - 1]) {
        EXPECT_EQ(s[i], s[i - 1]);
      }
  }
}

TEST(Smoothers, LocalMeanWindow) {
  // span 0.6 of n = 5 gives k = 3: previous, self, next.
  const std::vector<double> x{1, 2, 3, 4, 5}, y{0, 10, 20, 30, 40};
  const auto s = smooth_local_mean(x, y, 0.6);
  EXPECT_DOUBLE_EQ(s[2], 20.0);
  EXPECT_DOUBLE_EQ(s[1], 10.0);
}

TEST(Ace, NoiselessModels) {
  const auto lin = generate({ModelKind::Linear, 0.0, 1000, Marginal::StandardNormal, 1});
  EXPECT_GE(max_corr_ace(lin), 0.999);
  const auto quad = generate({ModelKind::Quadratic, 0.0, 1000, Marginal::StandardNormal, 1});
  EXPECT_GE(max_corr_ace(quad), 0.99);
}

TEST(Ace, NullQuantile) {
  int above = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const double v = max_corr_ace(generate({ModelKind::IndependentNull, 0.0, 1000, Marginal::StandardNormal, seed}));
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    if (v >= 0.134) ++above;
  }
  // 0.134 is an estimated 99% null quantile: the exceedance count is
  // binomial around 1%; allow two standard deviations.
  EXPECT_LE(above / 200.0, 0.01 + 2 * std::sqrt(0.01 * 0.99 / 200));
}

TEST(Ace, AtLeastPearsonOnFunctionalModels) {
  for (FunctionKind f : kAllFunctions) {
    for (double sigma : {0.0, 0.5, 1.0}) {
      const auto s = generate({model_of(f), sigma, 1000, Marginal::StandardNormal, 21});
      EXPECT_GE(max_corr_ace(s), std::fabs(pearson(s)) - 0.02) << to_string(f) << " sigma " << sigma;
    }
  }
}

TEST(Ace, AtLeastSqrtRSquaredOnLinearModel) {
  for (double sigma : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto s = generate({ModelKind::Linear, sigma, 1000, Marginal::StandardNormal, seed});
      EXPECT_GE(max_corr_ace(s), std::sqrt(r_squared(s, FunctionKind::Linear)) - 0.02)
          << "sigma " << sigma;
    }
  }
}

TEST(Ace, DiagnosticsAndDeterminism) {
  const auto s = generate({ModelKind::Circular, 0.5, 500, Marginal::StandardNormal, 2});
  const auto a = max_corr_ace_detailed(s);
  const auto b = max_corr_ace_detailed(s);
  EXPECT_EQ(a.value, b.value);
  EXPECT_TRUE(a.converged);
  EXPECT_GE(a.iterations, 1);
  EXPECT_LE(a.iterations, 100);
  EXPECT_EQ(a.fx.size(), s.size());
  // Transforms are standardized.
  double m = 0, v = 0;
  for (double t : a.fx) m += t;
  m /= static_cast<double>(a.fx.size());
  for (double t : a.fx) v += (t - m) * (t - m);
  EXPECT_NEAR(m, 0.0, 1e-9);
  EXPECT_NEAR(v / static_cast<double>(a.fx.size()), 1.0, 1e-9);

  AceConfig one;
  one.max_iter = 1;
  one.tol = 1e-300;
  const auto c = max_corr_ace_detailed(s, one);
  EXPECT_EQ(c.iterations, 1);
  EXPECT_FALSE(c.converged);
}

TEST(Ace, LocalMeanSmootherAlsoWorks) {
  AceConfig cfg;
  cfg.smoother = SmootherKind::LocalMean;
  const auto quad = generate({ModelKind::Quadratic, 0.0, 1000, Marginal::StandardNormal, 1});
  EXPECT_GE(max_corr_ace(quad, cfg), 0.98);
}

TEST(Ace, Errors) {
  EXPECT_THROW(max_corr_ace(PairedSample({1, 2, 3, 4}, {1, 2, 3, 4})), Error);
  try {
    max_corr_ace(PairedSample({1, 1, 1, 1, 1}, {1, 2, 3, 4, 5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroVariance);
  }
  AceConfig bad;
  bad.tol = 0.0;
  try {
    max_corr_ace(PairedSample({1, 2, 3, 4, 5}, {1, 3, 2, 5, 4}), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}
