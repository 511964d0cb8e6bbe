#pragma once

// Experiment layer: baselines, parameter sweeps and artifact files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mobrelay/power_opt.hpp"
#include "mobrelay/scenario.hpp"

namespace mobrelay {

enum class Mode { PowerOnly, TrajOnly, Joint, Free, StaticBaseline, DataFerry };
std::string to_string(Mode m);
// power-only | traj-only | joint | free | static-baseline | data-ferry (plus the CLI aliases
// power, traj, baseline, ferry). Throws ConfigError.
Mode parse_mode(const std::string& name);

enum class SweepAxis { None, Horizon, AvgPowerDbm };
std::string to_string(SweepAxis a);

struct ExperimentSpec {
  ScenarioConfig scenario;
  Mode mode = Mode::Free;
  SweepAxis axis = SweepAxis::None;
  std::vector<double> sweep_values;
  std::string preset = "forward-max-speed";  // power-only mode
  std::filesystem::path output_dir;          // empty: nothing is written
  bool emit_plots = false;
  bool record_timing = false;  // timing.csv; wall times make reruns differ
  double rel_tol = 1e-4;
  int max_iters = 50;
  double ferry_d1 = 100.0;
  double ferry_d2 = 100.0;
  unsigned threads = 0;  // 0: hardware concurrency

  // Throws ConfigError.
  void validate() const;
};

struct ResultRow {
  double sweep_value = 0.0;
  double throughput_sum = 0.0;
  double throughput_per_slot = 0.0;
  Mode mode = Mode::Free;
  double wall_time_seconds = 0.0;
  long solver_iterations = 0;
  std::string status = "ok";  // ok | warning | failed | invalid
  std::string detail;
};

struct RunArtifacts {
  Trajectory trajectory;
  PowerSchedule schedule;
  std::vector<double> source_levels;
  std::vector<double> relay_levels;
  // Optional convergence traces as (header, rows).
  std::vector<std::string> trace_header;
  std::vector<std::vector<double>> trace_rows;
};

struct RunReport {
  std::vector<ResultRow> rows;
  std::vector<RunArtifacts> artifacts;
  int exit_code = 0;  // 0 ok, 2 when any row failed
};

// Runs every sweep point (in parallel) and writes results.csv, timing.csv (on request),
// trajectory_<k>.csv, powers_<k>.csv, trace_<k>.csv and plot.gp under output_dir.
// Throws IoError when output_dir cannot be written.
RunReport run(const ExperimentSpec& spec);

// Scenario for one sweep point.
ScenarioConfig sweep_point(const ExperimentSpec& spec, double value);

// Relay parked above the midpoint of S and D.
PowerSolution static_baseline(const ScenarioConfig& cfg);

struct FerryResult {
  Trajectory trajectory;
  PowerSolution powers;
  bool empty_windows = false;  // no admissible slot on at least one side
};

// Source transmits only within horizontal range d1 of S, relay only within d2 of D.
PowerSolution ferry_power(const Trajectory& traj, const ScenarioConfig& cfg, double d1, double d2,
                          bool* empty_windows = nullptr);
FerryResult data_ferry(const ScenarioConfig& cfg, double d1, double d2);

std::string plot_script(const ExperimentSpec& spec, const std::vector<ResultRow>& rows);

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitIo = 3 };

}  // namespace mobrelay
