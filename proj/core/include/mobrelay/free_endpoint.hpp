#pragma once

// Jointly optimal design when neither the initial nor the final relay
// location is constrained: the relay stays on the S-D segment, moves
// monotonically towards D, and either flies at full speed or hovers above
// one of the two nodes.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobrelay/power_opt.hpp"
#include "mobrelay/scenario.hpp"

namespace mobrelay {

enum class HoverScenario { HoverAtD, HoverAtS, HoverBoth };
std::string to_string(HoverScenario s);

struct Caps {
  double source = 0.0;
  double relay = 0.0;
  double min() const { return source < relay ? source : relay; }
};

// Throws PreconditionError unless x is non-decreasing inside [0, D].
Caps caps_for_trajectory(std::span<const double> x, const ScenarioConfig& cfg);

struct HoverCandidate {
  HoverScenario scenario = HoverScenario::HoverAtD;
  std::vector<double> x;
  Caps caps;
  double parameter = 0.0;  // x1, xN, or N1
  bool crossed = false;    // the caps were balanced rather than hitting a boundary
  double throughput() const { return caps.min(); }
};

// x[n] = clamp(x1 + (n-1) V, 0, D), x1 balanced by bisection.
HoverCandidate scenario_hover_at_destination(const ScenarioConfig& cfg);
// x[n] = clamp(xN - (N-n) V, 0, D), xN balanced by bisection.
HoverCandidate scenario_hover_at_source(const ScenarioConfig& cfg);
// N1 slots at 0, full-speed transit, rest at D. Empty when N V <= D.
std::optional<HoverCandidate> scenario_hover_both(const ScenarioConfig& cfg);

// Positions of the hover-both pattern for a given N1.
std::vector<double> hover_both_positions(const ScenarioConfig& cfg, long n1);
long hover_both_max_n1(const ScenarioConfig& cfg);

struct FreeEndpointSolution {
  Trajectory trajectory;
  PowerSolution powers;
  HoverScenario scenario_tag = HoverScenario::HoverAtD;
  double throughput = 0.0;
  Caps caps;
  std::vector<HoverCandidate> candidates;
};

// Throws ConfigError when an endpoint is configured.
FreeEndpointSolution solve_free(const ScenarioConfig& cfg);

}  // namespace mobrelay
