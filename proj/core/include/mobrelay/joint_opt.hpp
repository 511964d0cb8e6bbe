#pragma once

// Alternating power / trajectory optimisation.

#include <vector>

#include "mobrelay/power_opt.hpp"
#include "mobrelay/scenario.hpp"
#include "mobrelay/traj_opt.hpp"

namespace mobrelay {

struct JointOptions {
  int outer_max = 30;
  double rel_tol = 1e-4;
  TrajOptions traj;
  DualSolveOptions dual;
};

struct JointResult {
  Trajectory trajectory;
  PowerSolution powers;
  double throughput = 0.0;
  // Throughput after every power half-step; entry 0 is the initial trajectory.
  std::vector<double> outer_trace;
  // Throughput after every trajectory half-step.
  std::vector<double> trajectory_trace;
  int rounds = 0;
  bool converged = false;
  bool failed = false;
};

JointResult alternate(const Trajectory& init, const ScenarioConfig& cfg, const JointOptions& options = {});

}  // namespace mobrelay
