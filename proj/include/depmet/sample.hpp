#pragma once

#include <cstddef>
#include <vector>

namespace depmet {

/// Paired observations (x_i, y_i). Construction checks equal, nonzero length
/// and finite entries; the default-constructed value is an empty placeholder.
struct PairedSample {
  std::vector<double> x;
  std::vector<double> y;

  PairedSample() = default;
  PairedSample(std::vector<double> xs, std::vector<double> ys);

  std::size_t size() const noexcept { return x.size(); }

  /// Same data with the roles of x and y exchanged.
  PairedSample swapped() const { return PairedSample(y, x); }
};

}  // namespace depmet
