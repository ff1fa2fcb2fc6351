#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

Emitter::Emitter(const RunConfig& config, std::string command)
    : config_(config),
      command_(std::move(command)),
      stem_(config.scenario.name + "_" + command_) {
  std::error_code ec;
  std::filesystem::create_directories(config_.output.directory, ec);
  if (ec) {
    throw ConfigError(fmt::format("cannot create output directory '{}': {}",
                                  config_.output.directory.string(), ec.message()));
  }
}

void Emitter::write(const std::filesystem::path& name, const std::string& contents) {
  const auto path = config_.output.directory / name;
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  entries_.push_back({{"file", name.string()}, {"fnv1a", fmt::format("{:016x}", fnv1a(contents))}});
  files_.push_back(path);
}

void Emitter::csv(const std::string& suffix, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) {
  if (!config_.output.csv) return;
  std::string s = fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += format_number(r[i]);
    }
    s += '\n';
  }
  write(fmt::format("{}_{}.csv", stem_, suffix), s);
}

void Emitter::report(const json& body) {
  if (!config_.output.json) return;
  write(stem_ + ".json", body.dump(2) + "\n");
}

void Emitter::svg(const std::string& suffix, const std::string& title,
                  const std::string& x_label, const std::vector<Series>& series) {
  if (!config_.output.svg) return;
  write(fmt::format("{}_{}.svg", stem_, suffix), render_svg(title, x_label, series));
}

std::filesystem::path Emitter::finish() {
  const json manifest = {{"command", command_},
                         {"config_hash", config_hash(config_.resolved)},
                         {"config", config_.resolved},
                         {"files", entries_}};
  const auto path = config_.output.directory / (stem_ + "_manifest.json");
  std::ofstream out(path, std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return path;
}

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, L = 60, R = 20, Tm = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - Tm - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" font-size=\"14\">{}</text>\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
      W, H, L, title, L, Tm, W - L - R, H - Tm - B);
  s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", L, H - B + 16, format_number(x0));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", W - R, H - B + 16,
                   format_number(x1));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                   0.5 * (L + W - R), H - 12, x_label);
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", L - 4, H - B,
                   format_number(y0));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", L - 4, Tm + 10,
                   format_number(y1));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* color = colors[k % 5];
    std::string pts;
    for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i) {
      if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(sr.x[i]), py(sr.y[i]));
    }
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                     color, pts);
    s += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", W - R - 140,
                     Tm + 18 + 16 * static_cast<double>(k), color, sr.name);
  }
  s += "</svg>\n";
  return s;
}

}  // namespace compete::cli
