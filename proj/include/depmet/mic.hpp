#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "depmet/sample.hpp"

namespace depmet {

struct MicConfig {
  /// Exponent in the grid bound B(n) = max(n^alpha, 4).
  double alpha = 0.6;
  /// Superclump factor: at most clump_factor * (max column count) clumps
  /// enter the column dynamic program.
  int clump_factor = 15;
  /// Replaces B(n) when set.
  std::optional<double> cell_bound;
  /// When the number of ways to cut the row axis, summed over all row
  /// counts, stays within this budget the row axis is searched exhaustively
  /// instead of being equipartitioned, which makes the result exact. Zero
  /// always equipartitions.
  std::size_t exact_budget = 512;
};

double mic_cell_bound(std::size_t n, const MicConfig& cfg);

/// Normalized grid mutual information indexed by (columns, rows) = (nx, ny),
/// defined for nx, ny >= 2 and nx * ny <= bound.
class CharacteristicMatrix {
 public:
  explicit CharacteristicMatrix(double bound);

  double bound() const noexcept { return bound_; }
  std::size_t max_side() const noexcept { return side_; }
  bool admissible(std::size_t nx, std::size_t ny) const noexcept;
  double at(std::size_t nx, std::size_t ny) const;
  /// Keeps the larger of the stored and the offered value.
  void offer(std::size_t nx, std::size_t ny, double value);
  /// Maximum over entries with nx * ny <= cell_limit (defaults to the bound).
  double max(std::optional<double> cell_limit = std::nullopt) const;

 private:
  double bound_;
  std::size_t side_;
  std::vector<double> entries_;
};

/// Splits `sorted_values` (ascending) into at most k contiguous rows of
/// near-equal size without separating equal values. Returns one row label
/// per sorted position. Throws DegenerateAxis for fewer than 2 distinct
/// values.
std::vector<int> equipartition_axis(std::span<const double> sorted_values, int k);

/// Column labels (clumps) for points in x order: maximal runs of consecutive
/// points in the same row, with tied x values never split. If more than
/// `max_clumps` result (and max_clumps > 0) adjacent clumps are merged into
/// max_clumps near-equal superclumps.
std::vector<int> clump_partition(std::span<const double> x_sorted, std::span<const int> rows,
                                 int max_clumps);

/// For fixed rows, the best mutual information (nats) over partitions of
/// the x axis into at most l columns with cuts only between clumps, for each
/// l = 2..max_cols; result[l - 2]. `clumps` must be nondecreasing.
std::vector<double> optimize_x_axis(std::span<const int> clumps, std::span<const int> rows,
                                    int num_rows, int max_cols);

CharacteristicMatrix characteristic_matrix(const PairedSample& s, const MicConfig& cfg = {});

/// Maximal information coefficient. Throws TooFewObservations for n < 8.
double mic(const PairedSample& s, const MicConfig& cfg = {});

/// Exhaustive search over every grid with nx, ny >= 2 and nx * ny <=
/// max_cells whose cuts fall between distinct order statistics. Only for
/// n <= 12 and max_cells <= 9 (InputTooLarge otherwise).
double mic_exhaustive_oracle(const PairedSample& s, int max_cells);

}  // namespace depmet
