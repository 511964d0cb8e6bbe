#include "mobrelay/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {

double ScenarioConfig::min_travel_distance() const {
  if (!start_point || !end_point) return 0.0;
  return std::hypot(end_point->x - start_point->x, end_point->y - start_point->y);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!(distance > 0)) fail("distance_D must be positive");
  if (!(altitude > 0)) fail("altitude_H must be positive");
  if (!(max_speed > 0)) fail("max_speed must be positive");
  if (!(slot_length > 0)) fail("slot_length must be positive");
  if (slot_count < 2) fail("slot_count_N must be at least 2");
  if (!(gamma0 > 0)) fail("reference_snr_gamma0 must be positive");
  if (!(avg_power_source >= 0) || !(avg_power_relay >= 0)) fail("average powers must be non-negative");
  if (!(noise_power > 0)) fail("noise_power must be positive");
  if (start_point && end_point) {
    const double reach = max_speed * horizon();
    if (reach < min_travel_distance() * (1.0 - 1e-12)) {
      fail(fmt::format("endpoints {:.6g} m apart cannot be joined within horizon (reach {:.6g} m)",
                       min_travel_distance(), reach));
    }
  }
}

void set_horizon(ScenarioConfig& cfg, double horizon_s) {
  if (!(horizon_s > 0)) throw ConfigError("horizon_T must be positive");
  const long slots = std::lround(horizon_s / cfg.slot_length);
  cfg.slot_count = static_cast<int>(std::max(2L, slots));
}

ScenarioConfig reference_setup(double horizon_s) {
  ScenarioConfig cfg;
  cfg.distance = 2000.0;
  cfg.altitude = 100.0;
  cfg.max_speed = 50.0;
  cfg.slot_length = 1.0;
  cfg.gamma0 = db_to_linear(80.0);
  cfg.avg_power_source = dbm_to_watts(10.0);
  cfg.avg_power_relay = dbm_to_watts(10.0);
  set_horizon(cfg, horizon_s);
  return cfg;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double feasibility_tolerance(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

Trajectory::Trajectory(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
  if (x.size() != y.size()) {
    throw DimensionError(fmt::format("trajectory x has {} entries but y has {}", x.size(), y.size()));
  }
}

Trajectory Trajectory::constant(std::size_t slots, Point2 p) {
  return Trajectory(std::vector<double>(slots, p.x), std::vector<double>(slots, p.y));
}

std::span<const double> ChannelProfile::source_gains() const {
  return std::span<const double>(gamma_sr).first(gamma_sr.size() - 1);
}

std::span<const double> ChannelProfile::relay_gains() const {
  return std::span<const double>(gamma_rd).subspan(1);
}

ChannelProfile channel_profile(const Trajectory& traj, const ScenarioConfig& cfg) {
  if (traj.x.size() != traj.y.size()) throw DimensionError("trajectory x/y length mismatch");
  if (traj.size() != static_cast<std::size_t>(cfg.slot_count)) {
    throw DimensionError(fmt::format("trajectory has {} slots, config expects {}", traj.size(), cfg.slot_count));
  }
  const double h2 = cfg.altitude * cfg.altitude;
  ChannelProfile out;
  out.gamma_sr.resize(traj.size());
  out.gamma_rd.resize(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const double x = traj.x[n];
    const double y = traj.y[n];
    const double dx = cfg.distance - x;
    out.gamma_sr[n] = cfg.gamma0 / (h2 + x * x + y * y);
    out.gamma_rd[n] = cfg.gamma0 / (h2 + dx * dx + y * y);
  }
  return out;
}

ChannelProfile channel_profile_on_axis(std::span<const double> x, const ScenarioConfig& cfg) {
  Trajectory traj(std::vector<double>(x.begin(), x.end()), std::vector<double>(x.size(), 0.0));
  return channel_profile(traj, cfg);
}

double link_rate(double power, double gain) {
  if (power < 0) throw DomainError(fmt::format("negative transmit power {}", power));
  return std::log2(1.0 + power * gain);
}

PowerSchedule make_schedule(std::vector<double> p_s, std::vector<double> p_r, const ChannelProfile& channels) {
  const std::size_t n = channels.size();
  if (p_s.size() != n || p_r.size() != n) throw DimensionError("power schedule length does not match channels");
  PowerSchedule s;
  s.p_s = std::move(p_s);
  s.p_r = std::move(p_r);
  s.p_s[n - 1] = 0.0;
  s.p_r[0] = 0.0;
  s.r_s.resize(n);
  s.r_r.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.r_s[i] = link_rate(std::max(0.0, s.p_s[i]), channels.gamma_sr[i]);
    s.r_r[i] = link_rate(std::max(0.0, s.p_r[i]), channels.gamma_rd[i]);
    s.p_s[i] = std::max(0.0, s.p_s[i]);
    s.p_r[i] = std::max(0.0, s.p_r[i]);
  }
  return s;
}

PowerSchedule schedule_from_rates(std::vector<double> p_s, std::vector<double> r_r, const ChannelProfile& channels) {
  const std::size_t n = channels.size();
  if (p_s.size() != n || r_r.size() != n) throw DimensionError("schedule length does not match channels");
  std::vector<double> p_r(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double r = std::max(0.0, r_r[i]);
    p_r[i] = std::expm1(r * std::log(2.0)) / channels.gamma_rd[i];
  }
  PowerSchedule s = make_schedule(std::move(p_s), std::move(p_r), channels);
  // Keep the requested rates bit-exact rather than the round-tripped ones.
  for (std::size_t i = 1; i < n; ++i) s.r_r[i] = std::max(0.0, r_r[i]);
  return s;
}

namespace {

MobilityReport check_mobility_impl(const Trajectory& traj, const ScenarioConfig& cfg, bool with_endpoints) {
  MobilityReport report;
  const double limit = cfg.step_limit();
  const double tol = feasibility_tolerance(limit);
  const std::size_t n = traj.size();
  if (n == 0) return report;
  if (with_endpoints && cfg.start_point) {
    const double d = std::hypot(traj.x[0] - cfg.start_point->x, traj.y[0] - cfg.start_point->y);
    if (d > limit + tol) report.violations.push_back({MobilityViolation::Kind::Start, 0, d});
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = std::hypot(traj.x[i + 1] - traj.x[i], traj.y[i + 1] - traj.y[i]);
    if (d > limit + tol) report.violations.push_back({MobilityViolation::Kind::Step, i, d});
  }
  if (with_endpoints && cfg.end_point) {
    const double d = std::hypot(cfg.end_point->x - traj.x[n - 1], cfg.end_point->y - traj.y[n - 1]);
    if (d > limit + tol) report.violations.push_back({MobilityViolation::Kind::End, n - 1, d});
  }
  return report;
}

}  // namespace

MobilityReport check_mobility(const Trajectory& traj, const ScenarioConfig& cfg) {
  return check_mobility_impl(traj, cfg, true);
}

MobilityReport check_speed_only(const Trajectory& traj, const ScenarioConfig& cfg) {
  return check_mobility_impl(traj, cfg, false);
}

bool CausalityReport::feasible() const {
  return std::all_of(slack.begin(), slack.end(), [&](double s) { return s >= -tolerance; });
}

double CausalityReport::min_slack() const {
  return slack.empty() ? 0.0 : *std::min_element(slack.begin(), slack.end());
}

CausalityReport check_causality(const PowerSchedule& schedule) {
  CausalityReport report;
  const std::size_t n = schedule.r_s.size();
  if (schedule.r_r.size() != n) throw DimensionError("rate sequences differ in length");
  double received = 0.0;
  double sent = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    received += schedule.r_s[k - 1];
    sent += schedule.r_r[k];
    report.slack.push_back(received - sent);
  }
  report.tolerance = feasibility_tolerance(received);
  return report;
}

BudgetReport check_budgets(const PowerSchedule& schedule, const ScenarioConfig& cfg) {
  BudgetReport report;
  report.source_used = std::accumulate(schedule.p_s.begin(), schedule.p_s.end(), 0.0);
  report.relay_used = std::accumulate(schedule.p_r.begin(), schedule.p_r.end(), 0.0);
  const bool nonneg = std::all_of(schedule.p_s.begin(), schedule.p_s.end(), [](double p) { return p >= 0; }) &&
                      std::all_of(schedule.p_r.begin(), schedule.p_r.end(), [](double p) { return p >= 0; });
  const double es = cfg.source_energy();
  const double er = cfg.relay_energy();
  const bool silent_ends = schedule.p_s.empty() || (schedule.p_s.back() == 0.0 && schedule.p_r.front() == 0.0);
  report.feasible = nonneg && silent_ends && report.source_used <= es + feasibility_tolerance(es) &&
                    report.relay_used <= er + feasibility_tolerance(er);
  return report;
}

double throughput(const PowerSchedule& schedule) {
  double total = 0.0;
  for (std::size_t k = 1; k < schedule.r_r.size(); ++k) total += schedule.r_r[k];
  return total;
}

std::vector<double> causal_forwarding(std::span<const double> r_s, std::span<const double> relay_caps) {
  if (r_s.size() != relay_caps.size()) throw DimensionError("rate and cap sequences differ in length");
  std::vector<double> r_r(r_s.size(), 0.0);
  double backlog = 0.0;
  for (std::size_t k = 1; k < r_s.size(); ++k) {
    backlog += r_s[k - 1];
    const double sent = std::clamp(relay_caps[k], 0.0, std::max(0.0, backlog));
    r_r[k] = sent;
    backlog -= sent;
  }
  return r_r;
}

std::string to_string(MobilityViolation::Kind kind) {
  switch (kind) {
    case MobilityViolation::Kind::Start:
      return "start";
    case MobilityViolation::Kind::Step:
      return "step";
    case MobilityViolation::Kind::End:
      return "end";
  }
  return "unknown";
}

}  // namespace mobrelay
