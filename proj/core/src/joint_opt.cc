#include "mobrelay/joint_opt.hpp"

#include <algorithm>
#include <cmath>

#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

// Keeps the incumbent fixed-power schedule when the allocator comes back worse.
PowerSolution best_of(PowerSolution fresh, const PowerSchedule& incumbent) {
  const double kept = throughput(incumbent);
  if (fresh.objective >= kept) return fresh;
  fresh.schedule = incumbent;
  fresh.objective = kept;
  return fresh;
}

}  // namespace

JointResult alternate(const Trajectory& init, const ScenarioConfig& cfg, const JointOptions& options) {
  JointResult out;
  out.trajectory = init;
  const Budgets budgets = Budgets::from(cfg);
  try {
    out.powers = optimal_power(channel_profile(init, cfg), budgets, options.dual);
  } catch (const std::runtime_error&) {
    out.failed = true;
    return out;
  }
  out.throughput = out.powers.objective;
  out.outer_trace.push_back(out.throughput);

  for (int round = 1; round <= options.outer_max; ++round) {
    const TrajResult tr = optimize_trajectory(out.trajectory, out.powers.schedule, cfg, options.traj);
    out.rounds = round;
    if (tr.failed && tr.trace.size() <= 1) {
      out.failed = true;
      break;
    }
    out.trajectory_trace.push_back(tr.throughput);
    PowerSolution next;
    try {
      next = best_of(optimal_power(channel_profile(tr.trajectory, cfg), budgets, options.dual), tr.schedule);
    } catch (const std::runtime_error&) {
      out.failed = true;
      break;
    }
    const double previous = out.throughput;
    out.trajectory = tr.trajectory;
    out.powers = std::move(next);
    out.throughput = out.powers.objective;
    out.outer_trace.push_back(out.throughput);
    if (tr.failed) {
      out.failed = true;
      break;
    }
    if ((out.throughput - previous) < options.rel_tol * std::max(std::abs(previous), 1e-300)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace mobrelay
