#include "mobrelay/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "mobrelay/convex/bisect.hpp"
#include "mobrelay/csv.hpp"
#include "mobrelay/errors.hpp"
#include "mobrelay/free_endpoint.hpp"
#include "mobrelay/joint_opt.hpp"
#include "mobrelay/presets.hpp"
#include "mobrelay/traj_opt.hpp"
#include "mobrelay/waterfill.hpp"

namespace mobrelay {
namespace {

struct Windows {
  std::vector<std::size_t> source;  // slot indices 0..N-2
  std::vector<std::size_t> relay;   // slot indices 1..N-1
};

Windows ferry_windows(const Trajectory& traj, const ScenarioConfig& cfg, double d1, double d2) {
  const double tol = 1e-9 * cfg.distance;
  Windows w;
  const std::size_t n = traj.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::hypot(traj.x[i], traj.y[i]) <= d1 + tol) w.source.push_back(i);
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (std::hypot(cfg.distance - traj.x[i], traj.y[i]) <= d2 + tol) w.relay.push_back(i);
  }
  return w;
}

std::vector<double> pick(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

Caps window_caps(const ChannelProfile& ch, const Windows& w, const ScenarioConfig& cfg) {
  Caps c;
  if (!w.source.empty()) c.source = cwf_rate(pick(ch.gamma_sr, w.source), cfg.source_energy());
  if (!w.relay.empty()) c.relay = cwf_rate(pick(ch.gamma_rd, w.relay), cfg.relay_energy());
  return c;
}

Caps ferry_caps(const std::vector<double>& x, const ScenarioConfig& cfg, double d1, double d2) {
  const Trajectory t(x, std::vector<double>(x.size(), 0.0));
  return window_caps(channel_profile(t, cfg), ferry_windows(t, cfg, d1, d2), cfg);
}

struct PointResult {
  ResultRow row;
  RunArtifacts artifacts;
};

PointResult run_point(const ExperimentSpec& spec, double value) {
  PointResult out;
  out.row.sweep_value = value;
  out.row.mode = spec.mode;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ScenarioConfig cfg = sweep_point(spec, value);
    RunArtifacts& art = out.artifacts;
    bool speed_only = false;
    switch (spec.mode) {
      case Mode::PowerOnly: {
        art.trajectory = preset_trajectory(spec.preset, cfg);
        const PowerSolution sol = optimal_power(art.trajectory, cfg);
        art.schedule = sol.schedule;
        art.source_levels = sol.source_levels;
        art.relay_levels = sol.relay_levels;
        out.row.solver_iterations = sol.dual_iterations;
        if (!sol.dual_converged) {
          out.row.status = "warning";
          out.row.detail = "dual iteration cap reached";
        }
        break;
      }
      case Mode::TrajOnly: {
        TrajOptions opt;
        opt.max_iters = spec.max_iters;
        opt.rel_tol = spec.rel_tol;
        const TrajResult tr = optimize_trajectory(straight_line(cfg), equal_powers(cfg), cfg, opt);
        art.trajectory = tr.trajectory;
        art.schedule = tr.schedule;
        out.row.solver_iterations = static_cast<long>(tr.trace.size()) - 1;
        art.trace_header = {"iteration", "lower_bound", "exact"};
        for (const auto& e : tr.trace) art.trace_rows.push_back({double(e.iteration), e.lower_bound, e.exact});
        if (tr.failed) {
          out.row.status = "failed";
          out.row.detail = "trajectory solver failure";
        }
        break;
      }
      case Mode::Joint: {
        JointOptions opt;
        opt.rel_tol = spec.rel_tol;
        opt.traj.max_iters = spec.max_iters;
        opt.traj.rel_tol = spec.rel_tol;
        const JointResult jr = alternate(straight_line(cfg), cfg, opt);
        art.trajectory = jr.trajectory;
        art.schedule = jr.powers.schedule;
        art.source_levels = jr.powers.source_levels;
        art.relay_levels = jr.powers.relay_levels;
        out.row.solver_iterations = jr.rounds;
        art.trace_header = {"round", "throughput"};
        for (std::size_t k = 0; k < jr.outer_trace.size(); ++k) art.trace_rows.push_back({double(k), jr.outer_trace[k]});
        if (jr.failed) {
          out.row.status = "failed";
          out.row.detail = "sub-solver failure";
        }
        break;
      }
      case Mode::Free: {
        const FreeEndpointSolution fs = solve_free(cfg);
        art.trajectory = fs.trajectory;
        art.schedule = fs.powers.schedule;
        art.source_levels = fs.powers.source_levels;
        art.relay_levels = fs.powers.relay_levels;
        out.row.solver_iterations = static_cast<long>(fs.candidates.size());
        out.row.detail = to_string(fs.scenario_tag);
        break;
      }
      case Mode::StaticBaseline: {
        const PowerSolution sol = static_baseline(cfg);
        art.trajectory = Trajectory::constant(cfg.slot_count, {0.5 * cfg.distance, 0.0});
        art.schedule = sol.schedule;
        art.source_levels = sol.source_levels;
        art.relay_levels = sol.relay_levels;
        speed_only = true;
        break;
      }
      case Mode::DataFerry: {
        const FerryResult fr = data_ferry(cfg, spec.ferry_d1, spec.ferry_d2);
        art.trajectory = fr.trajectory;
        art.schedule = fr.powers.schedule;
        art.source_levels = fr.powers.source_levels;
        art.relay_levels = fr.powers.relay_levels;
        speed_only = true;
        if (fr.empty_windows) {
          out.row.status = "warning";
          out.row.detail = "no admissible ferry slots";
        }
        break;
      }
    }
    const MobilityReport mob = speed_only ? check_speed_only(art.trajectory, cfg) : check_mobility(art.trajectory, cfg);
    const CausalityReport cau = check_causality(art.schedule);
    const BudgetReport bud = check_budgets(art.schedule, cfg);
    if (!mob.feasible() || !cau.feasible() || !bud.feasible) {
      out.row.status = "invalid";
      out.row.detail = fmt::format("mobility {} causality {} budgets {}", mob.feasible(), cau.feasible(), bud.feasible);
    }
    out.row.throughput_sum = throughput(art.schedule);
    out.row.throughput_per_slot = out.row.throughput_sum / cfg.slot_count;
  } catch (const std::exception& e) {
    out.row.status = "failed";
    out.row.detail = e.what();
  }
  out.row.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string axis_label(SweepAxis a) {
  switch (a) {
    case SweepAxis::Horizon:
      return "horizon T (s)";
    case SweepAxis::AvgPowerDbm:
      return "average power (dBm)";
    case SweepAxis::None:
      break;
  }
  return "horizon T (s)";
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::PowerOnly:
      return "power-only";
    case Mode::TrajOnly:
      return "traj-only";
    case Mode::Joint:
      return "joint";
    case Mode::Free:
      return "free";
    case Mode::StaticBaseline:
      return "static-baseline";
    case Mode::DataFerry:
      return "data-ferry";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  if (name == "power-only" || name == "power") return Mode::PowerOnly;
  if (name == "traj-only" || name == "traj") return Mode::TrajOnly;
  if (name == "joint") return Mode::Joint;
  if (name == "free") return Mode::Free;
  if (name == "static-baseline" || name == "baseline") return Mode::StaticBaseline;
  if (name == "data-ferry" || name == "ferry") return Mode::DataFerry;
  throw ConfigError(fmt::format("unknown mode '{}'", name));
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::None:
      return "none";
    case SweepAxis::Horizon:
      return "horizon_T";
    case SweepAxis::AvgPowerDbm:
      return "avg_power_dbm";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  scenario.validate();
  if (axis != SweepAxis::None && sweep_values.empty()) throw ConfigError("sweep axis set but no values given");
  for (std::size_t i = 0; i < sweep_values.size(); ++i) {
    if (!std::isfinite(sweep_values[i])) throw ConfigError("sweep values must be finite");
    if (axis == SweepAxis::Horizon && !(sweep_values[i] > 0)) throw ConfigError("horizon values must be positive");
    if (i > 0 && !(sweep_values[i] > sweep_values[i - 1])) throw ConfigError("sweep values must be strictly increasing");
  }
  if (mode == Mode::Free && !scenario.free_endpoints()) {
    throw ConfigError("free mode needs a scenario without start_point / end_point");
  }
  if (mode == Mode::PowerOnly) {
    const Trajectory t = preset_trajectory(preset, scenario);
    if (!check_mobility(t, scenario).feasible()) {
      throw ConfigError(fmt::format("preset '{}' violates the configured mobility constraints", preset));
    }
  }
  if (!(rel_tol > 0) || max_iters < 1) throw ConfigError("tolerance and iteration limit must be positive");
  if (ferry_d1 < 0 || ferry_d2 < 0) throw ConfigError("ferry ranges must be non-negative");
}

ScenarioConfig sweep_point(const ExperimentSpec& spec, double value) {
  ScenarioConfig cfg = spec.scenario;
  switch (spec.axis) {
    case SweepAxis::Horizon:
      set_horizon(cfg, value);
      break;
    case SweepAxis::AvgPowerDbm:
      cfg.avg_power_source = dbm_to_watts(value);
      cfg.avg_power_relay = dbm_to_watts(value);
      break;
    case SweepAxis::None:
      break;
  }
  cfg.validate();
  return cfg;
}

PowerSolution static_baseline(const ScenarioConfig& cfg) {
  const Trajectory t = Trajectory::constant(cfg.slot_count, {0.5 * cfg.distance, 0.0});
  return optimal_power(t, cfg);
}

PowerSolution ferry_power(const Trajectory& traj, const ScenarioConfig& cfg, double d1, double d2,
                          bool* empty_windows) {
  const ChannelProfile ch = channel_profile(traj, cfg);
  const Windows w = ferry_windows(traj, cfg, d1, d2);
  const std::size_t n = traj.size();
  std::vector<double> p_s(n, 0.0);
  std::vector<double> p_r(n, 0.0);
  PowerSolution sol;
  sol.case_tag = PowerCase::MonotoneClosedForm;
  sol.source_levels.assign(n - 1, 0.0);
  sol.relay_levels.assign(n - 1, 0.0);
  const bool empty = w.source.empty() || w.relay.empty();
  if (empty_windows) *empty_windows = empty;
  if (!empty) {
    const std::vector<double> gs = pick(ch.gamma_sr, w.source);
    const std::vector<double> gr = pick(ch.gamma_rd, w.relay);
    const double cap_s = cwf_rate(gs, cfg.source_energy());
    const double cap_r = cwf_rate(gr, cfg.relay_energy());
    const double es = cap_s <= cap_r ? cfg.source_energy() : std::min(cfg.source_energy(), inverse_cwf(gs, cap_r));
    const double er = cap_s <= cap_r ? std::min(cfg.relay_energy(), inverse_cwf(gr, cap_s)) : cfg.relay_energy();
    const WaterfillResult src = classic_wf(gs, es);
    const WaterfillResult rel = classic_wf(gr, er);
    for (std::size_t k = 0; k < w.source.size(); ++k) {
      p_s[w.source[k]] = src.powers[k];
      sol.source_levels[w.source[k]] = src.water_level;
    }
    for (std::size_t k = 0; k < w.relay.size(); ++k) {
      p_r[w.relay[k]] = rel.powers[k];
      sol.relay_levels[w.relay[k] - 1] = rel.water_level;
    }
    sol.dual_bound = std::min(cap_s, cap_r);
  }
  const PowerSchedule raw = make_schedule(p_s, p_r, ch);
  sol.schedule = schedule_from_rates(raw.p_s, causal_forwarding(raw.r_s, raw.r_r), ch);
  sol.objective = throughput(sol.schedule);
  sol.dual = DualState::from_lambda(std::vector<double>(n - 1, 0.0));
  return sol;
}

FerryResult data_ferry(const ScenarioConfig& cfg, double d1, double d2) {
  FerryResult out;
  const long hi = hover_both_max_n1(cfg);
  std::vector<double> x;
  if (cfg.slot_count * cfg.step_limit() > cfg.distance && hi >= 0) {
    const IntBisectResult b = bisect_int(
        [&](long n1) {
          const Caps c = ferry_caps(hover_both_positions(cfg, n1), cfg, d1, d2);
          return c.source - c.relay;
        },
        0, hi);
    long best = b.below;
    if (b.above != b.below) {
      const double lo_v = ferry_caps(hover_both_positions(cfg, b.below), cfg, d1, d2).min();
      const double hi_v = ferry_caps(hover_both_positions(cfg, b.above), cfg, d1, d2).min();
      if (hi_v > lo_v) best = b.above;
    }
    x = hover_both_positions(cfg, best);
    out.trajectory = Trajectory(x, std::vector<double>(x.size(), 0.0));
  } else {
    out.trajectory = forward_max_speed(cfg);
  }
  out.powers = ferry_power(out.trajectory, cfg, d1, d2, &out.empty_windows);
  return out;
}

std::string plot_script(const ExperimentSpec& spec, const std::vector<ResultRow>& rows) {
  std::string s;
  s += "# gnuplot script; run inside the output directory\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 900,600\n";
  s += "set grid\n";
  s += "set output 'throughput.png'\n";
  s += fmt::format("set xlabel '{}'\n", axis_label(spec.axis));
  s += "set ylabel 'throughput per slot (bits/s/Hz)'\n";
  s += fmt::format("plot 'results.csv' every ::1 using 3:5 with linespoints title '{}'\n", to_string(spec.mode));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::string tag = fmt::format("{}", k);
    s += fmt::format("set output 'trajectory_{}.png'\n", tag);
    s += "set xlabel 'x (m)'\nset ylabel 'y (m)'\n";
    s += fmt::format("plot 'trajectory_{}.csv' every ::1 using 2:3 with linespoints title 'relay'\n", tag);
    s += fmt::format("set output 'speed_{}.png'\n", tag);
    s += "set xlabel 'slot n'\nset ylabel 'speed (m/s)'\n";
    s += fmt::format("plot 'trajectory_{}.csv' every ::1 using 1:4 with steps title 'speed'\n", tag);
    s += fmt::format("set output 'powers_{}.png'\n", tag);
    s += "set xlabel 'slot n'\nset ylabel 'power (W)'\n";
    s += fmt::format(
        "plot 'powers_{0}.csv' every ::1 using 1:2 with steps title 'source', "
        "'powers_{0}.csv' every ::1 using 1:3 with steps title 'relay'\n",
        tag);
  }
  return s;
}

RunReport run(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<double> points = spec.sweep_values;
  if (spec.axis == SweepAxis::None || points.empty()) points = {spec.scenario.horizon()};

  std::vector<PointResult> results(points.size());
  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(points.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) results[i] = run_point(spec, points[i]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  RunReport report;
  for (auto& r : results) {
    if (r.row.status == "failed" || r.row.status == "invalid") report.exit_code = kExitSolver;
    report.rows.push_back(r.row);
    report.artifacts.push_back(std::move(r.artifacts));
  }

  if (!spec.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", spec.output_dir.string(), ec.message()));
    CsvTable table({"mode", "axis", "sweep_value", "throughput_sum", "throughput_per_slot", "solver_iterations",
                    "status"});
    CsvTable timing({"sweep_value", "wall_time_seconds"});
    for (const auto& row : report.rows) {
      table.add_row({to_string(row.mode), to_string(spec.axis), format_number(row.sweep_value),
                     format_number(row.throughput_sum), format_number(row.throughput_per_slot),
                     fmt::format("{}", row.solver_iterations), row.status});
      timing.add_numbers({row.sweep_value, row.wall_time_seconds});
    }
    table.write(spec.output_dir / "results.csv");
    if (spec.record_timing) timing.write(spec.output_dir / "timing.csv");
    for (std::size_t k = 0; k < report.artifacts.size(); ++k) {
      const RunArtifacts& art = report.artifacts[k];
      if (art.trajectory.size() == 0) continue;
      const double slot = sweep_point(spec, points[k]).slot_length;
      trajectory_table(art.trajectory, slot).write(spec.output_dir / fmt::format("trajectory_{}.csv", k));
      powers_table(art.schedule, art.source_levels, art.relay_levels)
          .write(spec.output_dir / fmt::format("powers_{}.csv", k));
      if (!art.trace_header.empty()) {
        CsvTable trace(art.trace_header);
        for (const auto& r : art.trace_rows) trace.add_numbers(r);
        trace.write(spec.output_dir / fmt::format("trace_{}.csv", k));
      }
    }
    if (spec.emit_plots) write_text(spec.output_dir / "plot.gp", plot_script(spec, report.rows));
  }
  return report;
}

}  // namespace mobrelay
