#include "mobrelay/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, text));
  }
  return v;
}

Point2 parse_point(const std::string& key, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError(fmt::format("{}: expected 'x, y', got '{}'", key, text));
  return {parse_number(key, text.substr(0, comma)), parse_number(key, text.substr(comma + 1))};
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Discretization inputs are resolved after the whole file is read.
struct Pending {
  std::optional<double> horizon;
  std::optional<int> slots;
  std::optional<double> slot_length;
  std::optional<double> beta0;
};

void apply(ScenarioConfig& cfg, Pending& pending, std::string key, const std::string& value) {
  if (key == "start_point") {
    cfg.start_point = parse_point(key, value);
    return;
  }
  if (key == "end_point") {
    cfg.end_point = parse_point(key, value);
    return;
  }
  double v = parse_number(key, value);
  if (ends_with(key, "_dbm")) {
    v = dbm_to_watts(v);
    key.resize(key.size() - 4);
  } else if (ends_with(key, "_db")) {
    v = db_to_linear(v);
    key.resize(key.size() - 3);
  }
  if (key == "distance_D") {
    cfg.distance = v;
  } else if (key == "altitude_H") {
    cfg.altitude = v;
  } else if (key == "max_speed") {
    cfg.max_speed = v;
  } else if (key == "horizon_T") {
    pending.horizon = v;
  } else if (key == "slot_count_N") {
    if (v != std::floor(v) || v < 2 || v > 1e7) throw ConfigError(fmt::format("slot_count_N: bad value {}", value));
    pending.slots = static_cast<int>(v);
  } else if (key == "slot_length") {
    pending.slot_length = v;
  } else if (key == "reference_snr_gamma0") {
    cfg.gamma0 = v;
  } else if (key == "reference_gain_beta0") {
    pending.beta0 = v;
  } else if (key == "avg_power_source") {
    cfg.avg_power_source = v;
  } else if (key == "avg_power_relay") {
    cfg.avg_power_relay = v;
  } else if (key == "avg_power") {
    cfg.avg_power_source = v;
    cfg.avg_power_relay = v;
  } else if (key == "noise_power") {
    cfg.noise_power = v;
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

void resolve(ScenarioConfig& cfg, const Pending& p) {
  if (p.slot_length) cfg.slot_length = *p.slot_length;
  if (p.horizon && p.slots) {
    if (p.slot_length && std::abs(*p.slot_length * *p.slots - *p.horizon) > 1e-9 * *p.horizon) {
      throw ConfigError("horizon_T, slot_count_N and slot_length are inconsistent");
    }
    cfg.slot_count = *p.slots;
    cfg.slot_length = *p.horizon / *p.slots;
  } else if (p.horizon) {
    if (!(cfg.slot_length > 0)) throw ConfigError("slot_length must be positive");
    set_horizon(cfg, *p.horizon);
  } else if (p.slots) {
    cfg.slot_count = *p.slots;
  }
  if (p.beta0) cfg.gamma0 = *p.beta0 / cfg.noise_power;
}

}  // namespace

void apply_config_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  Pending pending;
  apply(cfg, pending, key, value);
  resolve(cfg, pending);
}

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
  ScenarioConfig cfg;
  Pending pending;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key = value", origin, lineno));
    const std::string key = trim(line.substr(0, eq));
    try {
      apply(cfg, pending, key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", origin, lineno, e.what()));
    }
  }
  resolve(cfg, pending);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path));
  return parse_config(in, path);
}

std::string format_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << fmt::format("distance_D = {:.12g}\n", cfg.distance);
  out << fmt::format("altitude_H = {:.12g}\n", cfg.altitude);
  out << fmt::format("max_speed = {:.12g}\n", cfg.max_speed);
  out << fmt::format("slot_length = {:.12g}\n", cfg.slot_length);
  out << fmt::format("slot_count_N = {}\n", cfg.slot_count);
  out << fmt::format("reference_snr_gamma0 = {:.12g}\n", cfg.gamma0);
  out << fmt::format("avg_power_source = {:.12g}\n", cfg.avg_power_source);
  out << fmt::format("avg_power_relay = {:.12g}\n", cfg.avg_power_relay);
  out << fmt::format("noise_power = {:.12g}\n", cfg.noise_power);
  if (cfg.start_point) out << fmt::format("start_point = {:.12g}, {:.12g}\n", cfg.start_point->x, cfg.start_point->y);
  if (cfg.end_point) out << fmt::format("end_point = {:.12g}, {:.12g}\n", cfg.end_point->x, cfg.end_point->y);
  return out.str();
}

}  // namespace mobrelay
