#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete::cli {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{} must be an object", where));
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(fmt::format("{} needs '{}'", where, key));
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(fmt::format("{} must be a number", what));
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw ConfigError(fmt::format("{} must be a nonnegative integer", what));
  }
  return j.get<std::size_t>();
}

template <typename T>
T value_or(const json& j, const char* key, T fallback,
           T (*conv)(const json&, const std::string&), const std::string& where) {
  return j.contains(key) ? conv(j.at(key), fmt::format("{}.{}", where, key)) : fallback;
}

std::string text(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(fmt::format("{} must be a string", what));
  return j.get<std::string>();
}

bool flag(const json& j, const std::string& what) {
  if (!j.is_boolean()) throw ConfigError(fmt::format("{} must be true or false", what));
  return j.get<bool>();
}

PeriodicScalar parse_scalar(const json& j, double T, const std::string& where) {
  if (j.is_number()) return PeriodicScalar::constant(T, j.get<double>());
  const int kinds = int(j.contains("value")) + int(j.contains("mean")) + int(j.contains("table"));
  if (kinds != 1) {
    throw ConfigError(fmt::format("{} needs exactly one of 'value', 'mean', 'table'", where));
  }
  if (j.contains("value")) return PeriodicScalar::constant(T, number(j["value"], where + ".value"));
  if (j.contains("table")) {
    const json& t = j["table"];
    if (!t.is_array()) throw ConfigError(where + ".table must be a list of [t, value] pairs");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : t) {
      if (!k.is_array() || k.size() != 2) {
        throw ConfigError(where + ".table entries must be [t, value] pairs");
      }
      knots.emplace_back(number(k[0], where + ".table"), number(k[1], where + ".table"));
    }
    return PeriodicScalar::table(T, std::move(knots));
  }
  std::vector<Harmonic> hs;
  if (j.contains("harmonics")) {
    if (!j["harmonics"].is_array()) throw ConfigError(where + ".harmonics must be a list");
    for (const auto& h : j["harmonics"]) {
      const std::string w = where + ".harmonics[]";
      check_keys(h, {"order", "amplitude", "phase"}, w);
      Harmonic x;
      x.order = static_cast<int>(count(require(h, "order", w), w + ".order"));
      if (x.order < 1) throw ConfigError(w + ".order must be at least 1");
      x.amplitude = number(require(h, "amplitude", w), w + ".amplitude");
      x.phase = value_or(h, "phase", 0.0, number, w);
      hs.push_back(x);
    }
  }
  return PeriodicScalar::trig(T, number(j["mean"], where + ".mean"), std::move(hs));
}

CoefficientField parse_field(const json& j, double T, const std::string& where) {
  if (j.is_number()) return CoefficientField(PeriodicScalar::constant(T, j.get<double>()));
  check_keys(j, {"value", "mean", "harmonics", "table", "bump"}, where);
  if (j.contains("harmonics") && !j.contains("mean")) {
    throw ConfigError(where + ".harmonics needs 'mean'");
  }
  std::optional<SpatialBump> bump;
  if (j.contains("bump")) {
    const json& b = j["bump"];
    const std::string w = where + ".bump";
    check_keys(b, {"amplitude", "width", "ramp"}, w);
    const double width = number(require(b, "width", w), w + ".width");
    const double ramp = value_or(b, "ramp", 1.0, number, w);
    if (!(width > 0.0) || !(ramp >= 0.0)) {
      throw ConfigError(w + " needs width > 0 and ramp >= 0");
    }
    bump = SpatialBump::with_width(number(require(b, "amplitude", w), w + ".amplitude"),
                                   width, ramp);
  }
  return CoefficientField(parse_scalar(j, T, where), bump);
}

json field_json(const CoefficientField& f) {
  json out = std::visit(
      [](const auto& d) -> json {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, PeriodicScalar::Constant>) {
          return {{"value", d.value}};
        } else if constexpr (std::is_same_v<D, PeriodicScalar::Trig>) {
          json hs = json::array();
          for (const auto& h : d.harmonics) {
            hs.push_back({{"order", h.order}, {"amplitude", h.amplitude}, {"phase", h.phase}});
          }
          return {{"mean", d.mean}, {"harmonics", hs}};
        } else {
          json t = json::array();
          for (std::size_t i = 0; i < d.times.size(); ++i) t.push_back({d.times[i], d.values[i]});
          return {{"table", t}};
        }
      },
      f.baseline().descriptor());
  if (f.bump()) {
    out["bump"] = {{"amplitude", f.bump()->amplitude()},
                   {"width", 2.0 * f.bump()->plateau()},
                   {"ramp", f.bump()->ramp()}};
  }
  return out;
}

StepMode parse_mode(const std::string& s) {
  if (s == "implicit") return StepMode::diffusion_implicit;
  if (s == "explicit") return StepMode::explicit_euler;
  throw ConfigError(fmt::format("scheme.mode must be 'implicit' or 'explicit', got '{}'", s));
}

Scenario parse_scenario(const json& j) {
  const std::string w = "scenario";
  check_keys(j, {"name", "periods", "x0", "theta", "front", "eps", "target", "mode", "trials",
                 "zero_v", "K", "fronts"},
             w);
  Scenario s;
  s.name = value_or(j, "name", s.name, text, w);
  if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos) {
    throw ConfigError("scenario.name must be a nonempty file-name-safe string");
  }
  s.periods = value_or(j, "periods", s.periods, count, w);
  s.x0 = value_or(j, "x0", s.x0, number, w);
  s.theta = value_or(j, "theta", s.theta, number, w);
  if (!(s.theta > 0.0 && s.theta < 1.0)) throw ConfigError("scenario.theta must lie in (0, 1)");
  const std::string front = value_or(j, "front", std::string("competition"), text, w);
  if (front == "competition") {
    s.front = FrontKind::competition;
  } else if (front == "scalar") {
    s.front = FrontKind::scalar;
  } else {
    throw ConfigError("scenario.front must be 'competition' or 'scalar'");
  }
  if (j.contains("eps")) {
    if (!j["eps"].is_array() || j["eps"].empty()) {
      throw ConfigError("scenario.eps must be a nonempty list");
    }
    s.eps.clear();
    for (const auto& e : j["eps"]) s.eps.push_back(number(e, "scenario.eps"));
  }
  const std::string target = value_or(j, "target", std::string("a1"), text, w);
  const auto c = coef_from_name(target);
  if (!c) throw ConfigError(fmt::format("scenario.target '{}' is not a coefficient", target));
  s.target = *c;
  s.mode = value_or(j, "mode", s.mode, text, w);
  if (s.mode != "coexistence" && s.mode != "exclusion") {
    throw ConfigError("scenario.mode must be 'coexistence' or 'exclusion'");
  }
  s.trials = value_or(j, "trials", s.trials, count, w);
  s.zero_v = value_or(j, "zero_v", s.zero_v, flag, w);
  s.K = value_or(j, "K", s.K, number, w);
  if (!(s.K > 0.0)) throw ConfigError("scenario.K must be positive");
  s.fronts = value_or(j, "fronts", s.fronts, flag, w);
  return s;
}

json scenario_json(const Scenario& s) {
  return {{"name", s.name},
          {"periods", s.periods},
          {"x0", s.x0},
          {"theta", s.theta},
          {"front", s.front == FrontKind::scalar ? "scalar" : "competition"},
          {"eps", s.eps},
          {"target", coef_name(s.target)},
          {"mode", s.mode},
          {"trials", s.trials},
          {"zero_v", s.zero_v},
          {"K", s.K},
          {"fronts", s.fronts}};
}

OutputConfig parse_output(const json& j) {
  check_keys(j, {"directory", "formats"}, "output");
  OutputConfig o;
  if (j.contains("directory")) o.directory = text(j["directory"], "output.directory");
  if (j.contains("formats")) {
    if (!j["formats"].is_array()) throw ConfigError("output.formats must be a list");
    o.csv = o.json = o.svg = false;
    for (const auto& f : j["formats"]) {
      const std::string s = text(f, "output.formats");
      if (s == "csv") {
        o.csv = true;
      } else if (s == "json") {
        o.json = true;
      } else if (s == "svg") {
        o.svg = true;
      } else {
        throw ConfigError(fmt::format("unknown output format '{}'", s));
      }
    }
  }
  return o;
}

json output_json(const OutputConfig& o) {
  json formats = json::array();
  if (o.csv) formats.push_back("csv");
  if (o.json) formats.push_back("json");
  if (o.svg) formats.push_back("svg");
  return {{"directory", o.directory.string()}, {"formats", formats}};
}

Grid parse_grid(const json& j) {
  check_keys(j, {"x_min", "x_max", "n"}, "grid");
  return Grid(number(require(j, "x_min", "grid"), "grid.x_min"),
              number(require(j, "x_max", "grid"), "grid.x_max"),
              count(require(j, "n", "grid"), "grid.n"));
}

CoefficientSet parse_coefficients(const json& j) {
  check_keys(j, {"period", "a1", "b1", "c1", "a2", "b2", "c2"}, "coefficients");
  const double T = value_or(j, "period", 1.0, number, "coefficients");
  const auto f = [&](Coef c) {
    const std::string w = fmt::format("coefficients.{}", coef_name(c));
    return parse_field(require(j, coef_name(c), "coefficients"), T, w);
  };
  return CoefficientSet(f(Coef::a1), f(Coef::b1), f(Coef::c1), f(Coef::a2), f(Coef::b2),
                        f(Coef::c2));
}

json coefficients_json(const CoefficientSet& set) {
  json out = {{"period", set.period()}};
  for (Coef c : kAllCoefs) out[coef_name(c)] = field_json(set[c]);
  return out;
}

json canonical_coefficients() {
  return {{"period", 1.0}, {"a1", 1.0}, {"b1", 1.0}, {"c1", 0.5},
          {"a2", 0.4},     {"b2", 0.5}, {"c2", 1.0}};
}

json symmetric_coefficients() {
  json c = canonical_coefficients();
  c["a2"] = 1.0;
  return c;
}

json front_preset(const std::string& name, double bump) {
  json c = canonical_coefficients();
  if (bump != 0.0) {
    c["a1"] = {{"value", 1.0}, {"bump", {{"amplitude", bump}, {"width", 4.0}, {"ramp", 1.0}}}};
  }
  return {{"grid", {{"x_min", -60.0}, {"x_max", 220.0}, {"n", 2801}}},
          {"coefficients", c},
          {"scheme", {{"dt", 0.01}, {"mode", "implicit"}}},
          {"scenario", {{"name", name}, {"periods", 100}, {"x0", -20.0}}}};
}

}  // namespace

RunConfig parse_config(const json& j) {
  check_keys(j, {"grid", "kernel", "coefficients", "scheme", "scenario", "output", "seed"},
             "config");
  Grid grid = parse_grid(require(j, "grid", "config"));
  Dispersal dispersal = Dispersal::random();
  json kernel_json;
  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    check_keys(k, {"shape", "R"}, "kernel");
    const std::string shape = text(require(k, "shape", "kernel"), "kernel.shape");
    const auto s = kernel_shape_from_name(shape);
    if (!s) throw ConfigError(fmt::format("unknown kernel shape '{}'", shape));
    const double R = number(require(k, "R", "kernel"), "kernel.R");
    dispersal = Dispersal::nonlocal(Kernel(*s, R, grid.h()));
    check_kernel_fits(grid, *dispersal.kernel);
    kernel_json = {{"shape", kernel_shape_name(*s)}, {"R", R}};
  }
  CoefficientSet set = parse_coefficients(require(j, "coefficients", "config"));

  SchemeConfig scheme;
  if (j.contains("scheme")) {
    const json& s = j["scheme"];
    check_keys(s, {"dt", "mode"}, "scheme");
    scheme.dt = value_or(s, "dt", scheme.dt, number, "scheme");
    if (s.contains("mode")) scheme.mode = parse_mode(text(s["mode"], "scheme.mode"));
  }
  scheme.validate(grid, dispersal, set.period());

  const Scenario scenario = parse_scenario(j.value("scenario", json::object()));
  const OutputConfig output = parse_output(j.value("output", json::object()));
  std::uint64_t seed = 1;
  if (j.contains("seed")) {
    seed = count(j["seed"], "seed");
  }

  json resolved = {{"grid", {{"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"n", grid.size()}}},
                   {"coefficients", coefficients_json(set)},
                   {"scheme", {{"dt", scheme.dt}, {"mode", step_mode_name(scheme.mode)}}},
                   {"scenario", scenario_json(scenario)},
                   {"output", output_json(output)},
                   {"seed", seed}};
  if (!kernel_json.is_null()) resolved["kernel"] = kernel_json;
  return RunConfig{std::move(grid), std::move(dispersal), std::move(set), scheme,
                   scenario,        output,               seed,           std::move(resolved)};
}

json unwrap_manifest(const json& j) {
  if (j.is_object() && j.contains("config") && j.contains("files")) return j["config"];
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(unwrap_manifest(j));
}

std::vector<std::string> preset_names() {
  return {"kpp-control",          "canonical-h1h2",   "bump-not-slower",
          "bump-h2-equal-speed",  "remark31-destabilize", "thm41-coexistence",
          "continuity-sweep"};
}

json preset(const std::string& name) {
  if (name == "kpp-control") {
    return {{"grid", {{"x_min", -50.0}, {"x_max", 350.0}, {"n", 4001}}},
            {"coefficients", canonical_coefficients()},
            {"scheme", {{"dt", 0.01}, {"mode", "implicit"}}},
            {"scenario", {{"name", name}, {"periods", 100}, {"x0", -30.0}, {"front", "scalar"}}}};
  }
  if (name == "canonical-h1h2") return front_preset(name, 0.0);
  if (name == "bump-not-slower") return front_preset(name, -0.2);
  if (name == "bump-h2-equal-speed") return front_preset(name, 0.3);
  if (name == "remark31-destabilize") {
    return {{"grid", {{"x_min", -40.0}, {"x_max", 40.0}, {"n", 401}}},
            {"coefficients", canonical_coefficients()},
            {"scheme", {{"dt", 0.01}, {"mode", "implicit"}}},
            {"scenario", {{"name", name}}}};
  }
  if (name == "thm41-coexistence") {
    return {{"grid", {{"x_min", -30.0}, {"x_max", 30.0}, {"n", 301}}},
            {"coefficients", symmetric_coefficients()},
            {"scheme", {{"dt", 0.01}, {"mode", "implicit"}}},
            {"scenario", {{"name", name}, {"periods", 200}, {"trials", 5}}}};
  }
  if (name == "continuity-sweep") {
    json j = front_preset(name, 0.0);
    j["scenario"]["eps"] = {0.2, 0.1, 0.05};
    j["scenario"]["target"] = "a1";
    return j;
  }
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const json& resolved) {
  return fmt::format("{:016x}", fnv1a(resolved.dump()));
}

}  // namespace compete::cli
