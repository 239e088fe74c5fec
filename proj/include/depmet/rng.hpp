#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace depmet {

/// SplitMix64 finalizer. Used both to expand seeds into generator state and to
/// derive independent per-repetition stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for repetition `rep` of experiment `experiment_id`. A pure hash,
/// so any worker can compute any repetition's stream independently.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t experiment_id,
                          std::uint64_t rep) noexcept;

/// FNV-1a over a tag string; turns readable experiment names into ids.
std::uint64_t experiment_id(std::string_view tag) noexcept;

/// xoshiro256** (Blackman & Vigna). The state is seeded by SplitMix64 so any
/// 64-bit seed, including 0, gives a valid stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1); 53 random bits, never 0 or 1.
  double uniform() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Standard normal quantile, Wichura's AS 241 (PPND16), relative accuracy
/// about 1e-16. All normal variates in the library are drawn by inversion
/// through this function, so a seed maps to the same numbers on every build.
double normal_quantile(double p);

/// One normal variate. Always consumes exactly one uniform, including when
/// sd == 0 (in which case `mean` is returned exactly).
double sample_normal(Rng& rng, double mean, double sd);

double sample_exponential(Rng& rng, double rate);

/// Poisson variate by sequential CDF inversion.
double sample_poisson(Rng& rng, double mean);

}  // namespace depmet
