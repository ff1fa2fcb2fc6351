#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace compete::cli {

struct RunOptions {
  std::size_t workers = 1;
  bool mu_grid_only = false;
};

struct CommandResult {
  /// Human-readable lines for stdout.
  std::string summary;
  json report;
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

std::vector<std::string> command_names();

/// Folds command-line overrides into a raw config before parsing, so the
/// manifest records what actually ran.
json apply_overrides(json config, std::optional<std::size_t> periods,
                     const std::optional<std::string>& out_dir);

/// Runs one subcommand. Errors propagate as compete::Error subclasses.
CommandResult run_command(const std::string& command, const RunConfig& config,
                          const RunOptions& opts);

}  // namespace compete::cli
