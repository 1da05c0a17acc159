#pragma once

// Experiment configuration. TOML and JSON files are both converted to one
// JSON tree and validated against a fixed schema; unknown keys, wrong types
// and bad enumerations are rejected with the key path and source line.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace solitonforge {

using nlohmann::json;

enum class ConfigFormat { Toml, Json };

struct ExperimentConfig {
  json data = json::object();
  std::string source_name;
  /// Source line of each key path ("glue.t_max", "train.solitons[1].v").
  std::map<std::string, int> lines;

  bool has(const std::string& path) const;
  const json* find(const std::string& path) const;
  double number(const std::string& path, double fallback) const;
  std::optional<double> optional_number(const std::string& path) const;
  long long integer(const std::string& path, long long fallback) const;
  std::string string(const std::string& path, const std::string& fallback) const;
  bool boolean(const std::string& path, bool fallback) const;
  std::vector<double> numbers(const std::string& path) const;

  /// Replaces the value at a dotted path (tables are created as needed) and
  /// revalidates.
  void set(const std::string& path, const json& value);

  /// "name:line: key 'path'" prefix for diagnostics.
  std::string locate(const std::string& path) const;
};

ExperimentConfig parse_config(const std::string& text, ConfigFormat format,
                              const std::string& source_name = "<config>");
/// Format chosen from the extension (.toml, .json).
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws SolverError(ConfigError) on the first schema violation.
void validate_config(const ExperimentConfig& config);

}  // namespace solitonforge
