// Command-line front end for the experiment harness.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mobrelay/config.hpp"
#include "mobrelay/errors.hpp"
#include "mobrelay/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string preset = "forward-max-speed";
  std::string mode;
  std::vector<double> horizons;
  std::vector<double> pbar_dbm;
  double tol = 1e-4;
  int max_iters = 50;
  bool emit_plots = false;
  bool timing = false;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "scenario file (key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory for CSV artifacts");
  cmd->add_option("--t", f.horizons, "horizon values T in seconds (sweeps over T)")->delimiter(',');
  cmd->add_option("--pbar-dbm", f.pbar_dbm, "average power values in dBm (sweeps over power)")->delimiter(',');
  cmd->add_option("--tol", f.tol, "relative convergence tolerance for the outer loops")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", f.max_iters, "iteration cap for the outer loops")->check(CLI::PositiveNumber);
  cmd->add_flag("--emit-plots", f.emit_plots, "write a gnuplot script next to the CSVs");
  cmd->add_flag("--timing", f.timing, "also write per-point wall times to timing.csv");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

mobrelay::ExperimentSpec build_spec(const Flags& f, mobrelay::Mode mode, bool sweep) {
  using namespace mobrelay;
  ExperimentSpec spec;
  spec.scenario = f.config.empty() ? ScenarioConfig{} : load_config(f.config);
  spec.mode = mode;
  spec.preset = f.preset;
  spec.output_dir = f.out;
  spec.emit_plots = f.emit_plots;
  spec.record_timing = f.timing;
  spec.rel_tol = f.tol;
  spec.max_iters = f.max_iters;
  spec.threads = f.threads;
  if (!f.horizons.empty() && !f.pbar_dbm.empty()) throw ConfigError("--t and --pbar-dbm cannot be combined");
  if (!f.horizons.empty()) {
    spec.axis = SweepAxis::Horizon;
    spec.sweep_values = f.horizons;
  } else if (!f.pbar_dbm.empty()) {
    spec.axis = SweepAxis::AvgPowerDbm;
    spec.sweep_values = f.pbar_dbm;
  } else if (sweep) {
    spec.axis = SweepAxis::AvgPowerDbm;
    spec.sweep_values = {-10, -5, 0, 5, 10, 15, 20};
  }
  spec.validate();
  return spec;
}

void print_rows(const mobrelay::RunReport& report) {
  fmt::print("{:>16} {:>12} {:>16} {:>14} {:>10} {:>8}\n", "mode", "sweep", "throughput", "per_slot", "iters",
             "status");
  for (const auto& r : report.rows) {
    fmt::print("{:>16} {:>12.6g} {:>16.9g} {:>14.9g} {:>10} {:>8}", mobrelay::to_string(r.mode), r.sweep_value,
               r.throughput_sum, r.throughput_per_slot, r.solver_iterations, r.status);
    if (!r.detail.empty()) fmt::print("  {}", r.detail);
    fmt::print("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mobrelay;
  CLI::App app{"Mobile relay throughput experiments"};
  app.require_subcommand(1);
  Flags flags;

  struct Entry {
    const char* name;
    const char* help;
    Mode mode;
  };
  const std::vector<Entry> entries = {
      {"power", "power allocation on a preset trajectory", Mode::PowerOnly},
      {"traj", "trajectory optimization with equal powers", Mode::TrajOnly},
      {"joint", "alternating power and trajectory optimization", Mode::Joint},
      {"free", "optimal design with free endpoints", Mode::Free},
      {"baseline", "relay parked above the midpoint", Mode::StaticBaseline},
      {"ferry", "load near the source, carry, unload near the destination", Mode::DataFerry},
  };
  std::vector<std::pair<CLI::App*, Mode>> commands;
  for (const auto& e : entries) {
    CLI::App* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, flags);
    if (e.mode == Mode::PowerOnly) cmd->add_option("--preset", flags.preset, "trajectory preset");
    commands.emplace_back(cmd, e.mode);
  }
  CLI::App* sweep = app.add_subcommand("sweep", "run one mode over a list of horizons or powers");
  add_common(sweep, flags);
  sweep->add_option("--mode", flags.mode, "power | traj | joint | free | baseline | ferry")->required();
  sweep->add_option("--preset", flags.preset, "trajectory preset for power mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    ExperimentSpec spec;
    if (sweep->parsed()) {
      spec = build_spec(flags, parse_mode(flags.mode), true);
    } else {
      for (const auto& [cmd, mode] : commands) {
        if (cmd->parsed()) spec = build_spec(flags, mode, false);
      }
    }
    const RunReport report = run(spec);
    print_rows(report);
    return report.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}
