#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depmet/ace.hpp"
#include "depmet/error.hpp"
#include "depmet/mic.hpp"
#include "depmet/sample.hpp"

namespace depmet {

enum class MeasureKind { AbsPearson, AbsSpearman, MaxCorr, DistCorr, R1, MIC };

inline constexpr std::size_t kMeasureCount = 6;
inline constexpr std::array<MeasureKind, kMeasureCount> kAllMeasures = {
    MeasureKind::AbsPearson, MeasureKind::AbsSpearman, MeasureKind::MaxCorr,
    MeasureKind::DistCorr,   MeasureKind::R1,          MeasureKind::MIC};

/// Display names: |r|, |r_s|, ρ_max, ρ_dist, r1, MIC.
std::string_view display_name(MeasureKind m);
/// ASCII identifiers: pearson, spearman, maxcorr, dcor, r1, mic.
std::string_view ascii_name(MeasureKind m);
/// Accepts either spelling.
std::optional<MeasureKind> parse_measure(std::string_view name);

inline std::size_t index_of(MeasureKind m) { return static_cast<std::size_t>(m); }

/// Tuning shared by all measure evaluations in a run.
struct MeasureSettings {
  AceConfig ace;
  MicConfig mic;
};

/// Outcome of one measure on one sample: a value, or the error kind that
/// excluded it.
struct MeasureOutcome {
  std::optional<double> value;
  std::optional<ErrorKind> error;
  std::string message;
};

/// Evaluates one coefficient on its [0, 1] scale (absolute values for the
/// two correlation coefficients). Measure errors are captured, not thrown.
MeasureOutcome evaluate_measure(MeasureKind m, const PairedSample& s,
                                const MeasureSettings& settings = {});

/// Values for a set of measures on one sample, indexed by index_of(kind).
using MeasureRow = std::array<MeasureOutcome, kMeasureCount>;
MeasureRow evaluate_measures(const std::vector<MeasureKind>& measures, const PairedSample& s,
                             const MeasureSettings& settings = {});

}  // namespace depmet
