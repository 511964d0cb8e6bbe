#include "mobrelay/presets.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"
#include "mobrelay/free_endpoint.hpp"
#include "mobrelay/traj_opt.hpp"

namespace mobrelay {

Trajectory forward_max_speed(const ScenarioConfig& cfg) {
  const int n = cfg.slot_count;
  const long spare = hover_both_max_n1(cfg);
  std::vector<double> x;
  if (cfg.slot_count * cfg.step_limit() > cfg.distance && spare >= 0) {
    x = hover_both_positions(cfg, (spare + 1) / 2);
  } else {
    const double v = cfg.step_limit();
    const double x0 = 0.5 * (cfg.distance - (n - 1) * v);
    x.resize(n);
    for (int k = 0; k < n; ++k) x[k] = std::clamp(x0 + k * v, 0.0, cfg.distance);
  }
  return Trajectory(x, std::vector<double>(x.size(), 0.0));
}

Trajectory reverse_max_speed(const ScenarioConfig& cfg) {
  Trajectory t = forward_max_speed(cfg);
  std::reverse(t.x.begin(), t.x.end());
  return t;
}

Trajectory cyclic(const ScenarioConfig& cfg, double a, double b) {
  if (!(b > a)) throw ConfigError(fmt::format("cyclic preset needs a < b, got {} and {}", a, b));
  const int n = cfg.slot_count;
  const double span = b - a;
  const double v = cfg.step_limit();
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) {
    const double m = std::fmod(k * v, 2.0 * span);
    x[k] = a + (m <= span ? m : 2.0 * span - m);
  }
  return Trajectory(x, std::vector<double>(n, 0.0));
}

Trajectory preset_trajectory(const std::string& name, const ScenarioConfig& cfg) {
  if (name == "forward-max-speed") return forward_max_speed(cfg);
  if (name == "reverse-max-speed") return reverse_max_speed(cfg);
  if (name == "straight-line") return straight_line(cfg);
  if (name == "cyclic") return cyclic(cfg, 0.25 * cfg.distance, 0.75 * cfg.distance);
  static const std::regex pattern(R"(cyclic\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\))");
  std::smatch m;
  if (std::regex_match(name, m, pattern)) return cyclic(cfg, std::stod(m[1].str()), std::stod(m[2].str()));
  throw ConfigError(fmt::format("unknown trajectory preset '{}'", name));
}

}  // namespace mobrelay
