#pragma once

#include <string>

#include "mobrelay/scenario.hpp"

namespace mobrelay {

// S -> D at full speed with the spare time split between hovering above S and above D.
// When the horizon is too short to cross, a full-speed segment centred between S and D.
Trajectory forward_max_speed(const ScenarioConfig& cfg);
// Mirror image of forward_max_speed (D -> S).
Trajectory reverse_max_speed(const ScenarioConfig& cfg);
// Full-speed back-and-forth between x = a and x = b, starting at a.
Trajectory cyclic(const ScenarioConfig& cfg, double a, double b);

// forward-max-speed | reverse-max-speed | straight-line | cyclic | cyclic(a,b)
// Plain "cyclic" uses a = D/4, b = 3D/4. Throws ConfigError for unknown names.
Trajectory preset_trajectory(const std::string& name, const ScenarioConfig& cfg);

}  // namespace mobrelay
