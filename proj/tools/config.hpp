#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "compete/coefficients.hpp"
#include "compete/dispersal.hpp"
#include "compete/scheme.hpp"

namespace compete::cli {

using nlohmann::json;

enum class FrontKind { competition, scalar };

struct Scenario {
  std::string name = "custom";
  std::size_t periods = 100;
  double x0 = -20.0;
  double theta = 0.5;
  FrontKind front = FrontKind::competition;
  std::vector<double> eps = {0.2, 0.1, 0.05};
  Coef target = Coef::a1;
  std::string mode = "coexistence";
  std::size_t trials = 5;
  bool zero_v = false;
  double K = 10.0;
  bool fronts = false;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = false;
};

/// A validated run configuration. `resolved` is the same configuration with
/// every default spelled out; parsing it again gives an identical config.
struct RunConfig {
  Grid grid;
  Dispersal dispersal;
  CoefficientSet coefficients;
  SchemeConfig scheme;
  Scenario scenario;
  OutputConfig output;
  std::uint64_t seed = 1;
  json resolved;
};

/// Strict parse: unknown keys, missing sections and bad values raise
/// ConfigError. Also checks that dt divides the period and that the grid
/// satisfies the dispersal boundary rule.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::filesystem::path& path);

/// The configuration embedded in a manifest, or `j` itself.
json unwrap_manifest(const json& j);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
json preset(const std::string& name);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string config_hash(const json& resolved);

}  // namespace compete::cli
