// Acceptance checks. `acceptance` runs all of them; `acceptance <k>` runs one.
// Each prints a single "criterion <k> PASS|FAIL" line followed by details.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "instances.hpp"
#include "mobrelay/errors.hpp"
#include "mobrelay/free_endpoint.hpp"
#include "mobrelay/harness.hpp"
#include "mobrelay/joint_opt.hpp"
#include "mobrelay/power_opt.hpp"
#include "mobrelay/presets.hpp"
#include "mobrelay/traj_opt.hpp"
#include "mobrelay/waterfill.hpp"
#include "oracles.hpp"

namespace {

using namespace mobrelay;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

struct RandomInstance {
  ScenarioConfig cfg;
  ChannelProfile channels;
};

// Odd instances drift from the D side toward S, which is where two-sided level profiles appear.
std::vector<RandomInstance> random_walk_instances() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> slots(4, 20);
  std::vector<RandomInstance> out;
  for (int k = 0; k < 50; ++k) {
    const ScenarioConfig cfg = instances::with_slots(reference_setup(), slots(rng));
    const Trajectory t =
        k % 2 ? instances::random_drift_toward_source(cfg, rng) : instances::random_walk(cfg, rng);
    out.push_back({cfg, channel_profile(t, cfg)});
  }
  return out;
}

std::vector<RandomInstance> monotone_instances() {
  std::mt19937_64 rng(977);
  std::uniform_int_distribution<int> slots(4, 20);
  std::vector<RandomInstance> out;
  for (int k = 0; k < 50; ++k) {
    const ScenarioConfig cfg = instances::with_slots(reference_setup(), slots(rng));
    out.push_back({cfg, channel_profile(instances::random_sorted_axis(cfg, rng), cfg)});
  }
  return out;
}

// The non-monotone code path: dual ascent, primal recovery, best feasible candidate.
struct PipelineResult {
  double objective = 0.0;
  DualState dual;
};

PipelineResult dual_pipeline(const ChannelProfile& ch, Budgets b) {
  const DualSolveResult dual = solve_dual(ch, b);
  PipelineResult out;
  out.dual = dual.dual;
  out.objective = dual.best_candidate_objective;
  try {
    out.objective = std::max(out.objective, recover_primal(dual.dual, ch, b).objective);
  } catch (const std::runtime_error&) {
  }
  return out;
}

Outcome criterion_1() {
  const auto inst = random_walk_instances();
  double worst = 0.0;
  double solve_time = 0.0;
  int non_monotone = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& in : inst) {
    const Budgets b = Budgets::from(in.cfg);
    const auto ts = std::chrono::steady_clock::now();
    const PowerSolution sol = optimal_power(in.channels, b);
    solve_time += seconds_since(ts);
    if (sol.case_tag != PowerCase::MonotoneClosedForm) ++non_monotone;
    worst = std::max(worst, rel_diff(sol.objective, oracle::power_program(in.channels, b).objective));
  }
  const double total = seconds_since(t0);
  return {worst <= 1e-4 && total <= 60.0,
          fmt::format("50 instances ({} via the dual), worst relative gap {:.3g} (limit 1e-4), "
                      "allocator {:.2f} s, total with oracle {:.2f} s (limit 60 s)",
                      non_monotone, worst, solve_time, total)};
}

bool non_increasing(const std::vector<double>& v, double tol) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + tol * std::max(1.0, std::abs(v[i - 1]))) return false;
  }
  return true;
}

bool non_decreasing(const std::vector<double>& v, double tol) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - tol * std::max(1.0, std::abs(v[i - 1]))) return false;
  }
  return true;
}

Outcome criterion_2() {
  int case1 = 0;
  int bad = 0;
  for (const auto& in : random_walk_instances()) {
    const PowerSolution sol = optimal_power(in.channels, Budgets::from(in.cfg));
    if (sol.case_tag != PowerCase::Case1) continue;
    ++case1;
    if (!non_increasing(sol.source_levels, 1e-9) || !non_decreasing(sol.relay_levels, 1e-9)) ++bad;
  }
  return {case1 > 0 && bad == 0,
          fmt::format("{} two-sided instances among 50, {} with a non-monotone level profile", case1, bad)};
}

Outcome criterion_3() {
  double worst = 0.0;
  int inexact = 0;
  for (const auto& in : monotone_instances()) {
    const Budgets b = Budgets::from(in.cfg);
    const PowerSolution closed = solve_monotone(in.channels, b);
    const double caps = std::min(cwf_rate(in.channels.source_gains(), b.source),
                                 cwf_rate(in.channels.relay_gains(), b.relay));
    if (closed.objective != caps) ++inexact;
    worst = std::max(worst, rel_diff(closed.objective, dual_pipeline(in.channels, b).objective));
  }
  return {worst <= 1e-6 && inexact == 0,
          fmt::format("50 monotone instances, worst closed-form vs dual gap {:.3g} (limit 1e-6), "
                      "{} differ from the smaller cap",
                      worst, inexact)};
}

Outcome criterion_4() {
  double worst = 0.0;
  for (const auto& in : monotone_instances()) {
    const PipelineResult r = dual_pipeline(in.channels, Budgets::from(in.cfg));
    for (std::size_t k = 0; k + 1 < r.dual.lambda.size(); ++k) worst = std::max(worst, r.dual.lambda[k]);
  }
  return {worst <= 1e-5, fmt::format("largest interior multiplier {:.3g} (limit 1e-5)", worst)};
}

Outcome criterion_5() {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 10);
  const double v = cfg.step_limit();
  double worst_slack = std::numeric_limits<double>::infinity();
  double worst_grad = 0.0;
  for (int pair = 0; pair < 1000; ++pair) {
    const Trajectory traj = instances::random_walk(cfg, rng);
    std::vector<double> ps(cfg.slot_count), pr(cfg.slot_count);
    for (int n = 0; n < cfg.slot_count; ++n) {
      ps[n] = std::pow(10.0, -4.0 + 4.0 * unit(rng));
      pr[n] = std::pow(10.0, -4.0 + 4.0 * unit(rng));
    }
    const PowerSchedule powers = make_schedule(ps, pr, channel_profile(traj, cfg));
    const ScaCoefficients c = sca_coefficients(traj, powers, cfg);
    Increments inc;
    for (int n = 0; n < cfg.slot_count; ++n) {
      const double r = 4.0 * v * unit(rng);
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      inc.dx.push_back(r * std::cos(phi));
      inc.dy.push_back(r * std::sin(phi));
    }
    const LowerBoundRates lb = lower_bound_rates(c, inc);
    for (int n = 0; n < cfg.slot_count; ++n) {
      const double x = traj.x[n] + inc.dx[n];
      const double y = traj.y[n] + inc.dy[n];
      const double true_s = oracle::link_rate_at(x, y, 0.0, powers.p_s[n] * cfg.gamma0, cfg.altitude);
      const double true_r = oracle::link_rate_at(x, y, cfg.distance, powers.p_r[n] * cfg.gamma0, cfg.altitude);
      worst_slack = std::min({worst_slack, true_s - lb.r_s[n], true_r - lb.r_r[n]});

      const auto fd_s = oracle::rate_gradient(traj.x[n], traj.y[n], 0.0, powers.p_s[n] * cfg.gamma0, cfg.altitude, 1e-3);
      const auto fd_r =
          oracle::rate_gradient(traj.x[n], traj.y[n], cfg.distance, powers.p_r[n] * cfg.gamma0, cfg.altitude, 1e-3);
      auto grad_err = [](double bx, double by, const oracle::Gradient& fd) {
        const double norm = std::hypot(fd.dx, fd.dy);
        if (norm == 0.0) return std::hypot(bx, by) == 0.0 ? 0.0 : 1.0;
        return std::hypot(bx - fd.dx, by - fd.dy) / norm;
      };
      if (n < cfg.slot_count - 1) worst_grad = std::max(worst_grad, grad_err(-c.b_s[n], -c.c_s[n], fd_s));
      if (n > 0) worst_grad = std::max(worst_grad, grad_err(-c.b_r[n], -c.c_r[n], fd_r));
    }
  }
  return {worst_slack >= -1e-9 && worst_grad <= 1e-4,
          fmt::format("1000 pairs, smallest (true - bound) {:.3g} (limit -1e-9), "
                      "worst relative gradient error {:.3g} (limit 1e-4)",
                      worst_slack, worst_grad)};
}

Outcome criterion_6() {
  ScenarioConfig cfg = reference_setup(100.0);
  cfg.start_point = Point2{1000.0, 500.0};
  cfg.end_point = Point2{1500.0, 500.0};
  const auto t0 = std::chrono::steady_clock::now();
  const TrajResult r = optimize_trajectory(straight_line(cfg), equal_powers(cfg), cfg);
  const double elapsed = seconds_since(t0);
  double worst_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.trace.size(); ++i) worst_step = std::min(worst_step, r.trace[i].exact - r.trace[i - 1].exact);
  const int iterations = static_cast<int>(r.trace.size()) - 1;
  const double initial = r.trace.front().exact;
  const double gain = r.throughput / initial - 1.0;
  const auto [lo, hi] = std::minmax_element(r.trajectory.x.begin(), r.trajectory.x.end());
  const bool pass = !r.failed && r.converged && iterations <= 20 && worst_step >= -1e-9 && gain > 0.05 &&
                    elapsed <= 120.0;
  return {pass, fmt::format("exact {:.6f} -> {:.6f} (+{:.1f}%), {} iterations, converged {}, smallest step {:.3g}, "
                            "x range [{:.1f}, {:.1f}], {:.1f} s",
                            initial, r.throughput, 100.0 * gain, iterations, r.converged, worst_step, *lo, *hi,
                            elapsed)};
}

Outcome criterion_7() {
  std::string detail;
  bool lattice_ok = true;
  for (int n = 3; n <= 6; ++n) {
    const ScenarioConfig cfg = instances::lattice_setup(n);
    const FreeEndpointSolution sol = solve_free(cfg);
    const oracle::LatticeBest best = oracle::lattice_enumeration(cfg);
    const double diff = sol.throughput - best.throughput;
    const bool ok = std::abs(diff) <= 1e-9;
    lattice_ok = lattice_ok && ok;
    std::string xs;
    for (double x : best.x) xs += fmt::format("{}{:g}", xs.empty() ? "" : " ", x);
    detail += fmt::format("N={}: solver {:.9f} ({}) enumeration {:.9f} over {} paths, best x [{}] {}; ", n,
                          sol.throughput, to_string(sol.scenario_tag), best.throughput, best.enumerated, xs,
                          ok ? "match" : "MISMATCH");
  }
  const ScenarioConfig cfg = reference_setup(100.0);
  const FreeEndpointSolution sol = solve_free(cfg);
  const double v = cfg.step_limit();
  int non_binary = 0;
  int interior_hover = 0;
  for (std::size_t n = 0; n + 1 < sol.trajectory.size(); ++n) {
    const double step = sol.trajectory.x[n + 1] - sol.trajectory.x[n];
    const bool still = std::abs(step) <= 1e-6 * v;
    if (!still && std::abs(step - v) > 1e-6 * v) ++non_binary;
    const double x = sol.trajectory.x[n];
    if (still && x > 1e-9 * cfg.distance && x < cfg.distance * (1.0 - 1e-9)) ++interior_hover;
  }
  detail += fmt::format("reference setup: {} non-binary moves, {} hovers away from S and D", non_binary,
                        interior_hover);
  return {lattice_ok && non_binary == 0 && interior_hover == 0, detail};
}

Outcome criterion_8() {
  const ScenarioConfig cfg = reference_setup(100.0);
  const FreeEndpointSolution free = solve_free(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const JointResult joint = alternate(straight_line(cfg), cfg);
  const double ratio = joint.throughput / free.throughput;
  return {!joint.failed && ratio >= 0.98,
          fmt::format("joint {:.6f} after {} rounds ({:.1f} s), free {:.6f}, ratio {:.4f} (limit 0.98)",
                      joint.throughput, joint.rounds, seconds_since(t0), free.throughput, ratio)};
}

Outcome criterion_9() {
  const ScenarioConfig cfg = reference_setup(100.0);
  const double free = solve_free(cfg).throughput;
  const double joint = alternate(straight_line(cfg), cfg).throughput;
  const double stat = static_baseline(cfg).objective;
  const double forward = optimal_power(forward_max_speed(cfg), cfg).objective;
  const double reverse = optimal_power(reverse_max_speed(cfg), cfg).objective;
  const double crossing = cfg.distance / cfg.max_speed;
  const ScenarioConfig short_cfg = reference_setup(1.1 * crossing);
  const ScenarioConfig long_cfg = reference_setup(10.0 * crossing);
  const double ferry_short = data_ferry(short_cfg, 100.0, 100.0).powers.objective;
  const double static_short = static_baseline(short_cfg).objective;
  const double ferry_long = data_ferry(long_cfg, 100.0, 100.0).powers.objective;
  const double free_long = solve_free(long_cfg).throughput;
  const double slack = 1e-9 * free;
  const bool a = free >= joint - slack && joint >= stat;
  const bool b = forward >= stat && stat >= reverse;
  const bool c = ferry_short < static_short;
  const bool d = ferry_long >= 0.9 * free_long;
  return {a && b && c && d,
          fmt::format("T=100 s: free {:.4f} >= joint {:.4f} >= static {:.4f} [{}]; forward {:.4f} >= static >= "
                      "reverse {:.4f} [{}]; T={:g} s: ferry {:.4f} < static {:.4f} [{}]; T={:g} s: ferry {:.4f} >= "
                      "0.9 x free {:.4f} [{}]",
                      free, joint, stat, a ? "ok" : "violated", forward, reverse, b ? "ok" : "violated",
                      short_cfg.horizon(), ferry_short, static_short, c ? "ok" : "violated", long_cfg.horizon(),
                      ferry_long, free_long, d ? "ok" : "violated")};
}

Outcome criterion_10() {
  const ScenarioConfig cfg = reference_setup(100.0);
  const double got = static_baseline(cfg).objective;
  const double expected = oracle::static_midpoint_throughput(cfg);
  const double per_slot = got / cfg.slot_count;
  return {std::abs(per_slot - 0.99) <= 0.02 && rel_diff(got, expected) <= 1e-9,
          fmt::format("per-slot {:.6f} (target 0.99 +- 0.02), analytic {:.6f}", per_slot,
                      expected / cfg.slot_count)};
}

Outcome criterion_11() {
  std::mt19937_64 rng(1111);
  std::uniform_int_distribution<int> slots(4, 16);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const ScenarioConfig cfg = instances::with_slots(reference_setup(), slots(rng));
    std::vector<double> x{0.5 * cfg.distance * (1.0 + unit(rng))};
    for (int n = 1; n < cfg.slot_count; ++n) {
      x.push_back(std::clamp(x.back() + cfg.step_limit() * unit(rng), 0.0, cfg.distance));
    }
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const Budgets b = Budgets::from(cfg);
    const double original = optimal_power(channel_profile_on_axis(x, cfg), b).objective;
    const double reordered = optimal_power(channel_profile_on_axis(sorted, cfg), b).objective;
    worst = std::max(worst, original - reordered);
  }
  return {worst <= 1e-9, fmt::format("100 trajectories, largest loss from sorting {:.3g} (limit 1e-9)", worst)};
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    files[e.path().filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

Outcome criterion_12() {
  std::vector<ExperimentSpec> specs;
  {
    ExperimentSpec s;
    s.mode = Mode::Free;
    s.axis = SweepAxis::Horizon;
    s.sweep_values = {50, 100, 200, 400};
    specs.push_back(s);
  }
  {
    ExperimentSpec s;
    s.mode = Mode::PowerOnly;
    s.preset = "cyclic";
    s.scenario = reference_setup(40.0);
    s.axis = SweepAxis::AvgPowerDbm;
    s.sweep_values = {0, 10};
    specs.push_back(s);
  }
  {
    ExperimentSpec s;
    s.mode = Mode::TrajOnly;
    s.scenario = reference_setup(30.0);
    s.scenario.start_point = Point2{600.0, 200.0};
    s.scenario.end_point = Point2{1400.0, 200.0};
    specs.push_back(s);
  }
  {
    ExperimentSpec s;
    s.mode = Mode::DataFerry;
    s.axis = SweepAxis::Horizon;
    s.sweep_values = {44, 400};
    specs.push_back(s);
  }
  {
    ExperimentSpec s;
    s.mode = Mode::StaticBaseline;
    s.emit_plots = true;
    specs.push_back(s);
  }
  const fs::path root = fs::temp_directory_path() / "mobrelay_determinism";
  fs::remove_all(root);
  int differing = 0;
  std::size_t files = 0;
  std::string detail;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      ExperimentSpec s = specs[k];
      s.output_dir = root / fmt::format("spec{}_run{}", k, rep);
      run(s);
      auto contents = read_dir(s.output_dir);
      if (rep == 0) {
        first = std::move(contents);
        files += first.size();
      } else if (contents != first) {
        ++differing;
        detail += fmt::format(" {} differs;", to_string(s.mode));
      }
    }
  }
  fs::remove_all(root);
  return {differing == 0 && files > 0,
          fmt::format("{} specs run twice, {} files per pass, {} specs with differing output{}", specs.size(), files,
                      differing, detail)};
}

const std::vector<std::function<Outcome()>> kCriteria = {
    criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
};

bool run_one(int k) {
  Outcome o;
  try {
    o = kCriteria.at(k - 1)();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  std::printf("criterion %d %s\n    %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int k = 1; k <= static_cast<int>(kCriteria.size()); ++k) which.push_back(k);
  }
  bool all = true;
  for (int k : which) {
    if (k < 1 || k > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    all = run_one(k) && all;
  }
  return all ? 0 : 1;
}
