#include "mobrelay/free_endpoint.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mobrelay/convex/bisect.hpp"
#include "mobrelay/errors.hpp"
#include "mobrelay/waterfill.hpp"

namespace mobrelay {
namespace {

std::vector<double> shifted_line(const ScenarioConfig& cfg, double first, bool anchor_end) {
  const int n = cfg.slot_count;
  const double v = cfg.step_limit();
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) {
    const double offset = anchor_end ? -(n - 1 - k) * v : k * v;
    x[k] = std::clamp(first + offset, 0.0, cfg.distance);
  }
  return x;
}

HoverCandidate balance(const ScenarioConfig& cfg, HoverScenario tag, bool anchor_end) {
  auto diff = [&](double p) {
    const Caps c = caps_for_trajectory(shifted_line(cfg, p, anchor_end), cfg);
    return c.source - c.relay;
  };
  const BisectResult b = bisect(diff, 0.0, cfg.distance, 1e-6 * cfg.distance);
  HoverCandidate out;
  out.scenario = tag;
  out.parameter = b.point;
  out.crossed = b.crossed;
  out.x = shifted_line(cfg, b.point, anchor_end);
  out.caps = caps_for_trajectory(out.x, cfg);
  return out;
}

}  // namespace

std::string to_string(HoverScenario s) {
  switch (s) {
    case HoverScenario::HoverAtD:
      return "hover-at-D";
    case HoverScenario::HoverAtS:
      return "hover-at-S";
    case HoverScenario::HoverBoth:
      return "hover-both";
  }
  return "unknown";
}

Caps caps_for_trajectory(std::span<const double> x, const ScenarioConfig& cfg) {
  if (x.size() != static_cast<std::size_t>(cfg.slot_count)) throw DimensionError("positions differ from slot count");
  const double tol = 1e-9 * cfg.distance;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < -tol || x[i] > cfg.distance + tol) throw PreconditionError("position outside [0, D]");
    if (i > 0 && x[i] < x[i - 1] - tol) throw PreconditionError("positions must be non-decreasing");
  }
  const ChannelProfile ch = channel_profile_on_axis(x, cfg);
  return {cwf_rate(ch.source_gains(), cfg.source_energy()), cwf_rate(ch.relay_gains(), cfg.relay_energy())};
}

HoverCandidate scenario_hover_at_destination(const ScenarioConfig& cfg) {
  return balance(cfg, HoverScenario::HoverAtD, false);
}

HoverCandidate scenario_hover_at_source(const ScenarioConfig& cfg) {
  return balance(cfg, HoverScenario::HoverAtS, true);
}

long hover_both_max_n1(const ScenarioConfig& cfg) {
  const double travel = cfg.distance / cfg.step_limit();
  // Guard against D/V landing a hair above an integer.
  const long slots = static_cast<long>(std::ceil(travel - 1e-9 * std::max(1.0, travel)));
  return cfg.slot_count - slots;
}

std::vector<double> hover_both_positions(const ScenarioConfig& cfg, long n1) {
  const int n = cfg.slot_count;
  const double v = cfg.step_limit();
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = std::clamp(v * static_cast<double>(k + 1 - n1), 0.0, cfg.distance);
  return x;
}

std::optional<HoverCandidate> scenario_hover_both(const ScenarioConfig& cfg) {
  if (!(cfg.slot_count * cfg.step_limit() > cfg.distance)) return std::nullopt;
  const long hi = hover_both_max_n1(cfg);
  if (hi < 0) return std::nullopt;
  auto caps_at = [&](long n1) { return caps_for_trajectory(hover_both_positions(cfg, n1), cfg); };
  // Source cap grows with N1, relay cap shrinks.
  const IntBisectResult b = bisect_int(
      [&](long n1) {
        const Caps c = caps_at(n1);
        return c.source - c.relay;
      },
      0, hi);
  HoverCandidate best;
  best.scenario = HoverScenario::HoverBoth;
  bool have = false;
  for (long n1 : {b.below, b.above}) {
    const Caps c = caps_at(n1);
    if (!have || c.min() > best.caps.min()) {
      best.caps = c;
      best.parameter = static_cast<double>(n1);
      have = true;
    }
  }
  best.crossed = b.crossed;
  best.x = hover_both_positions(cfg, static_cast<long>(best.parameter));
  return best;
}

FreeEndpointSolution solve_free(const ScenarioConfig& cfg) {
  if (!cfg.free_endpoints()) throw ConfigError("free-endpoint solution needs unconstrained endpoints");
  FreeEndpointSolution out;
  out.candidates.push_back(scenario_hover_at_destination(cfg));
  out.candidates.push_back(scenario_hover_at_source(cfg));
  if (auto c = scenario_hover_both(cfg)) out.candidates.push_back(std::move(*c));

  const HoverCandidate* best = &out.candidates.front();
  for (const auto& c : out.candidates) {
    if (c.throughput() > best->throughput()) best = &c;
  }
  out.scenario_tag = best->scenario;
  out.caps = best->caps;
  out.trajectory = Trajectory(best->x, std::vector<double>(best->x.size(), 0.0));
  out.powers = solve_monotone(channel_profile(out.trajectory, cfg), Budgets::from(cfg));
  out.throughput = out.powers.objective;
  return out;
}

}  // namespace mobrelay
