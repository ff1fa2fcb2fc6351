#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "compete/errors.hpp"
#include "config.hpp"

using namespace compete;
using namespace compete::cli;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spreading and coexistence in time-periodic competition systems"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, preset_name;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> periods;
  RunOptions opts;
  auto* cfg_opt = app.add_option("--config", config_path, "JSON config or manifest");
  auto* preset_opt = app.add_option("--preset", preset_name, "built-in scenario")
                         ->check(CLI::IsMember(preset_names()));
  cfg_opt->excludes(preset_opt);
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--workers", opts.workers, "worker threads for sweep")
      ->check(CLI::PositiveNumber);
  app.add_flag("--mu-grid-only", opts.mu_grid_only, "scan the mu grid without refinement");
  app.add_option("--periods", periods, "override scenario.periods");

  for (const auto& name : command_names()) app.add_subcommand(name, "run " + name);
  auto* presets = app.add_subcommand("presets", "list presets or print one as JSON");
  std::string show;
  presets->add_option("name", show, "preset to print")->check(CLI::IsMember(preset_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::config);
  }

  try {
    if (presets->parsed()) {
      if (show.empty()) {
        for (const auto& n : preset_names()) fmt::print("{}\n", n);
      } else {
        fmt::print("{}\n", preset(show).dump(2));
      }
      return 0;
    }
    if (config_path.empty() && preset_name.empty()) {
      throw ConfigError("one of --config or --preset is required");
    }
    const json raw = config_path.empty() ? preset(preset_name) : unwrap_manifest(read_json(config_path));
    const RunConfig config = parse_config(apply_overrides(raw, periods, out_dir));
    const std::string command = app.get_subcommands().front()->get_name();
    const CommandResult r = run_command(command, config, opts);
    fmt::print("{}\n", r.summary);
    fmt::print("manifest: {}\n", r.manifest.string());
    return 0;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return 1;
  }
}
