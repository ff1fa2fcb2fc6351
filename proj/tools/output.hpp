#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace compete::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes the artifacts of one run under `<dir>/<scenario>_<command>*` and a
/// manifest listing each file with its content hash and the config hash.
/// Numbers are printed with fixed precision so reruns are byte-identical.
class Emitter {
 public:
  Emitter(const RunConfig& config, std::string command);

  void csv(const std::string& suffix, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows);
  void report(const json& body);
  void svg(const std::string& suffix, const std::string& title, const std::string& x_label,
           const std::vector<Series>& series);
  /// Returns the manifest path.
  std::filesystem::path finish();

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  void write(const std::filesystem::path& name, const std::string& contents);

  const RunConfig& config_;
  std::string command_;
  std::string stem_;
  json entries_ = json::array();
  std::vector<std::filesystem::path> files_;
};

/// Shortest round-trip-safe text for a double, fixed across platforms.
std::string format_number(double v);

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<Series>& series);

}  // namespace compete::cli
