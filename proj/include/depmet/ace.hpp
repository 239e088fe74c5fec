#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "depmet/sample.hpp"

namespace depmet {

enum class SmootherKind {
  /// Mean of the k = max(2, round(span * n)) rank-nearest neighbours; the
  /// window is clipped at the ends of the data.
  LocalMean,
  /// Friedman's variable-span super smoother (local linear fits with spans
  /// 0.05, 0.2, 0.5 and cross-validated span selection) with bass
  /// enhancement; `span` is ignored.
  SuperSmoother,
};

struct AceConfig {
  int max_iter = 100;
  double tol = 1e-6;
  /// Neighbourhood fraction for LocalMean.
  double span = 0.1;
  /// Bass control in [0, 10] for SuperSmoother: where the woofer span's
  /// cross-validated residual is barely worse than the best one, the chosen
  /// span is pulled toward the woofer. 0 disables it.
  double bass = 5.0;
  SmootherKind smoother = SmootherKind::SuperSmoother;
};

struct AceResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Final standardized transforms of x and y, in input order.
  std::vector<double> fx;
  std::vector<double> fy;
};

/// Smoothers operate on x sorted ascending with y in the same order. Tied x
/// values always receive the same smoothed value.
std::vector<double> smooth_local_mean(std::span<const double> x_sorted,
                                      std::span<const double> y, double span);
std::vector<double> super_smoother(std::span<const double> x_sorted, std::span<const double> y,
                                   double bass = 0.0);

/// Maximal correlation estimated by alternating conditional expectations.
/// Non-convergence within max_iter is reported in the result, not thrown.
/// Throws TooFewObservations for n < 5 and ZeroVariance for constant input.
AceResult max_corr_ace_detailed(const PairedSample& s, const AceConfig& cfg = {});
double max_corr_ace(const PairedSample& s, const AceConfig& cfg = {});

}  // namespace depmet
