#pragma once

// Power allocation for a fixed relay trajectory.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mobrelay/scenario.hpp"
#include "mobrelay/waterfill.hpp"

namespace mobrelay {

struct Budgets {
  double source = 0.0;  // E_s, joules per unit bandwidth-time
  double relay = 0.0;   // E_r

  static Budgets from(const ScenarioConfig& cfg) { return {cfg.source_energy(), cfg.relay_energy()}; }
};

// Multipliers of the cumulative causality constraints.
//   lambda[k] <-> slot k + 2          (lambda_2 .. lambda_N)
//   beta[k]   <-> source slot k + 1   (beta_1 .. beta_{N-1})
//   nu[k]     <-> relay slot k + 2    (nu_2 .. nu_N)
// With this indexing beta[k] + nu[k] = 1.
struct DualState {
  std::vector<double> lambda;
  std::vector<double> beta;
  std::vector<double> nu;

  // Negative entries within 1e-12 are clamped; larger ones throw DomainError.
  static DualState from_lambda(std::vector<double> lambda);
  std::size_t size() const { return lambda.size(); }
};

enum class PowerCase { Case1, Case2, Case3, MonotoneClosedForm };
std::string to_string(PowerCase c);

struct PowerSolution {
  PowerSchedule schedule;
  DualState dual;
  PowerCase case_tag = PowerCase::Case1;
  double objective = 0.0;
  // Per-slot water levels; source_levels[k] for slot k + 1, relay_levels[k] for slot k + 2.
  std::vector<double> source_levels;
  std::vector<double> relay_levels;
  long dual_iterations = 0;
  bool dual_converged = true;
  double dual_bound = 0.0;  // best dual value (upper bound on the optimum); equals objective on the closed-form path
};

struct DualEvaluation {
  double value = 0.0;
  Eigen::VectorXd subgradient;
  WaterfillResult source;  // over source slots 1..N-1
  WaterfillResult relay;   // over relay slots 2..N
  // Feasible schedule built from the maximisers by causal forwarding, and its throughput.
  PowerSchedule candidate;
  double candidate_objective = 0.0;
};

DualEvaluation dual_value_and_subgradient(const DualState& dual, const ChannelProfile& channels, Budgets budgets);

struct DualSolveOptions {
  long max_iters = 0;  // 0 selects 500 * N^2
  double tol = 1e-9;
};

struct DualSolveResult {
  DualState dual;
  double value = 0.0;
  double lower_bound = 0.0;
  long iterations = 0;
  bool converged = false;
  PowerSchedule best_candidate;
  double best_candidate_objective = 0.0;
};

DualSolveResult solve_dual(const ChannelProfile& channels, Budgets budgets, const DualSolveOptions& options = {});

// Case threshold on beta_1 and nu_N.
inline constexpr double kCaseEpsilon = 1e-6;

PowerSolution recover_primal(const DualState& dual, const ChannelProfile& channels, Budgets budgets);

struct RelayRates {
  std::vector<double> p_r;  // N entries, p_r[0] = 0
  std::vector<double> r_r;
};

// Best relay schedule for fixed source rates r_s (N entries, r_s[N-1] ignored).
// gamma_rd has N entries; slot 0 is unused.
RelayRates relay_schedule_given_source(std::span<const double> r_s, std::span<const double> gamma_rd,
                                       double relay_budget);

// Cheapest source powers (N entries) delivering the relay rates r_r causally.
// Throws CaseInconsistencyError when more than source_budget is needed.
std::vector<double> min_power_source_schedule(std::span<const double> r_r, std::span<const double> gamma_sr,
                                              double source_budget);

// gamma_sr non-increasing over slots 1..N-1 and gamma_rd non-decreasing over 2..N.
bool has_monotone_channels(const ChannelProfile& channels, double tol = 1e-12);

// Throws PreconditionError unless has_monotone_channels.
PowerSolution solve_monotone(const ChannelProfile& channels, Budgets budgets);

PowerSolution optimal_power(const ChannelProfile& channels, Budgets budgets, const DualSolveOptions& options = {});
PowerSolution optimal_power(const Trajectory& traj, const ScenarioConfig& cfg);

}  // namespace mobrelay
