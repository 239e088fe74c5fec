#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "depmet/sample.hpp"

namespace depmet {

/// Pearson's product-moment correlation. Throws ZeroVariance when either
/// vector is constant and TooFewObservations when n < 2.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(const PairedSample& s);

/// 1-based ranks; tied entries get the mean of the ranks they span.
std::vector<double> rank_midrank(std::span<const double> v);

double spearman(const PairedSample& s);

/// Sample distance correlation from double-centred distance matrices
/// (V-statistic form). Returns 0 when the denominator vanishes. Throws
/// TooFewObservations for n <= 4.
double dist_corr(const PairedSample& s);

/// pow(n, 1.0/3.0) truncated to an integer, never below 2. Truncating the
/// floating-point power is what the common equal-frequency discretizers do;
/// note it gives 9, not 10, for n = 1000 because 1.0/3.0 < 1/3.
std::size_t equal_frequency_bin_count(std::size_t n);

/// Equal-frequency labels in [0, bins). Tied values always share a label.
/// Throws DegenerateBins when v has fewer than two distinct values.
std::vector<int> discretize_equal_frequency(std::span<const double> v, std::size_t bins);

class ContingencyTable {
 public:
  /// counts[i][j]; rows must be rectangular and the total positive.
  explicit ContingencyTable(const std::vector<std::vector<long>>& counts);
  /// Cross-tabulates two label vectors of equal length.
  ContingencyTable(std::span<const int> a, std::span<const int> b);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  long at(std::size_t i, std::size_t j) const { return counts_[i * cols_ + j]; }
  long total() const noexcept { return total_; }
  ContingencyTable transposed() const;

 private:
  ContingencyTable() = default;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<long> counts_;
  long total_ = 0;
};

enum class LogBase { Nats, Bits };

/// Plug-in (naive) mutual information of the empirical cell frequencies.
double mutual_info_naive(const ContingencyTable& t, LogBase base = LogBase::Nats);

/// sqrt(1 - exp(-2 I)) with I in nats.
double information_coefficient(double mutual_info_nats);

struct R1Result {
  double value = 0.0;
  double mutual_info_nats = 0.0;
  double mutual_info_bits = 0.0;
  std::size_t bins = 0;
};

/// Information coefficient of correlation: both margins discretised into
/// equal_frequency_bin_count(n) equal-frequency bins. Throws
/// TooFewObservations for n <= 7.
R1Result r1_detailed(const PairedSample& s);
double r1_coefficient(const PairedSample& s);

}  // namespace depmet
