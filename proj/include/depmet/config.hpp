#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "depmet/experiments.hpp"

namespace depmet {

enum class Command { Table1, NoiseSweep, SizeSweep, Critical, Power, Equitability };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

/// Everything one experiment subcommand needs. `experiment` carries the
/// shared fields; the rest are specific to some subcommands.
struct RunConfig {
  Command command = Command::Table1;
  ExperimentConfig experiment;
  /// critical / power: repetitions of the null model behind the thresholds.
  std::size_t null_repetitions = 500;
  /// power / size-sweep power: significance level.
  double alpha = 0.05;
  /// size-sweep: when nonempty, also estimate power against n (linear, sigma 1).
  std::vector<std::size_t> power_n_values;
  std::size_t power_repetitions = 500;
  /// equitability
  std::vector<FunctionKind> functions{std::begin(kAllFunctions), std::end(kAllFunctions)};
  std::vector<double> noise_levels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> equitability_sigmas;

  EquitabilityConfig equitability() const;
};

/// Desk-scale defaults for a subcommand.
RunConfig default_config(Command c);

/// Applies a JSON object over default_config(c). Unknown keys, wrong types
/// and out-of-range values raise ConfigError naming the key.
RunConfig parse_config(const nlohmann::json& doc, Command c);
RunConfig parse_config_text(const std::string& text, Command c);

/// Full echo of the effective configuration (parse_config accepts it back).
nlohmann::json to_json(const RunConfig& cfg);

/// Hex FNV-1a of the canonical echo.
std::string config_hash(const RunConfig& cfg);

/// Rejects what parse_config would reject; used after CLI overrides.
void validate(const RunConfig& cfg);

}  // namespace depmet
