#pragma once

// Trajectory refinement for fixed transmit powers by successive concave
// lower bounds on the link rates.

#include <optional>
#include <vector>

#include "mobrelay/convex/interior_point.hpp"
#include "mobrelay/scenario.hpp"

namespace mobrelay {

// Around the point q_l[n], with increment (dx, dy):
//   r_lb = base - a (dx^2 + dy^2) - b dx - c dy  <=  true rate
struct ScaCoefficients {
  std::vector<double> a_s, b_s, c_s;
  std::vector<double> a_r, b_r, c_r;
  std::vector<double> r_s_base, r_r_base;

  std::size_t size() const { return a_s.size(); }
};

ScaCoefficients sca_coefficients(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg);

struct Increments {
  std::vector<double> dx;
  std::vector<double> dy;
};

struct LowerBoundRates {
  std::vector<double> r_s;
  std::vector<double> r_r;
};

LowerBoundRates lower_bound_rates(const ScaCoefficients& coeffs, const Increments& inc);

// Variables: [u_x (N), u_y (N), R_r for slots 2..N (N-1)] with increments = V * u.
struct IncrementProgram {
  QcqpProblem problem;
  Eigen::VectorXd start;  // strictly feasible
  double scale = 1.0;     // V
  int increment_vars = 0;
  int rate_vars = 0;
  int mobility_constraints = 0;
  int causality_constraints = 0;
  int rate_constraints = 0;

  Increments increments(const Eigen::VectorXd& z) const;
};

IncrementProgram build_increment_qcqp(const ScaCoefficients& coeffs, const Trajectory& traj,
                                      const ScenarioConfig& cfg);

// Throughput with fixed powers on a trajectory: rates from the link formulas,
// relay rates by causal forwarding.
double exact_throughput(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg);
PowerSchedule forwarded_schedule(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg);

struct ScaStep {
  Trajectory trajectory;
  double objective_lb = 0.0;
  double objective_exact = 0.0;
  bool solver_failed = false;
  bool accepted = true;
};

// previous_exact, when given, rejects steps that would lower the exact objective.
ScaStep sca_step(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg,
                 std::optional<double> previous_exact = std::nullopt);

struct TrajOptions {
  int max_iters = 50;
  double rel_tol = 1e-4;
};

struct TrajTraceEntry {
  int iteration = 0;
  double lower_bound = 0.0;
  double exact = 0.0;
};

struct TrajResult {
  Trajectory trajectory;
  PowerSchedule schedule;  // the fixed powers with forwarded relay rates
  double throughput = 0.0;
  std::vector<TrajTraceEntry> trace;  // entry 0 is the initial trajectory
  bool converged = false;
  bool failed = false;
};

TrajResult optimize_trajectory(const Trajectory& init, const PowerSchedule& powers, const ScenarioConfig& cfg,
                               const TrajOptions& options = {});

// Uniform-speed straight line. Between the endpoints when both are set; otherwise
// centred between S and D and as long as the speed limit allows (capped at D).
Trajectory straight_line(const ScenarioConfig& cfg);

// Source at E_s/(N-1) in slots 1..N-1, relay at E_r/(N-1) in slots 2..N.
PowerSchedule equal_powers(const ScenarioConfig& cfg);

}  // namespace mobrelay
