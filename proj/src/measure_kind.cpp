#include "depmet/measure_kind.hpp"

#include <cmath>

#include "depmet/measures.hpp"

namespace depmet {

std::string_view display_name(MeasureKind m) {
  switch (m) {
    case MeasureKind::AbsPearson: return "|r|";
    case MeasureKind::AbsSpearman: return "|r_s|";
    case MeasureKind::MaxCorr: return "\xcf\x81_max";
    case MeasureKind::DistCorr: return "\xcf\x81_dist";
    case MeasureKind::R1: return "r1";
    case MeasureKind::MIC: return "MIC";
  }
  return "?";
}

std::string_view ascii_name(MeasureKind m) {
  switch (m) {
    case MeasureKind::AbsPearson: return "pearson";
    case MeasureKind::AbsSpearman: return "spearman";
    case MeasureKind::MaxCorr: return "maxcorr";
    case MeasureKind::DistCorr: return "dcor";
    case MeasureKind::R1: return "r1";
    case MeasureKind::MIC: return "mic";
  }
  return "?";
}

std::optional<MeasureKind> parse_measure(std::string_view name) {
  for (MeasureKind m : kAllMeasures) {
    if (name == display_name(m) || name == ascii_name(m)) return m;
  }
  if (name == "rho_max") return MeasureKind::MaxCorr;
  if (name == "rho_dist") return MeasureKind::DistCorr;
  if (name == "MIC") return MeasureKind::MIC;
  return std::nullopt;
}

MeasureOutcome evaluate_measure(MeasureKind m, const PairedSample& s,
                                const MeasureSettings& settings) {
  MeasureOutcome out;
  try {
    switch (m) {
      case MeasureKind::AbsPearson: out.value = std::fabs(pearson(s)); break;
      case MeasureKind::AbsSpearman: out.value = std::fabs(spearman(s)); break;
      case MeasureKind::MaxCorr: out.value = max_corr_ace(s, settings.ace); break;
      case MeasureKind::DistCorr: out.value = dist_corr(s); break;
      case MeasureKind::R1: out.value = r1_coefficient(s); break;
      case MeasureKind::MIC: out.value = mic(s, settings.mic); break;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw;
    out.value.reset();
    out.error = e.kind();
    out.message = e.what();
  }
  return out;
}

MeasureRow evaluate_measures(const std::vector<MeasureKind>& measures, const PairedSample& s,
                             const MeasureSettings& settings) {
  MeasureRow row;
  for (MeasureKind m : measures) row[index_of(m)] = evaluate_measure(m, s, settings);
  return row;
}

}  // namespace depmet
