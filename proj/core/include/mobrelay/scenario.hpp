#pragma once

// Physical model of the source -> mobile relay -> destination link.
//
// Slots are stored 0-based: slot n (1..N) lives at index n-1. The source is
// silent in the last slot and the relay is silent in the first one, so the
// source side uses indices [0, N-2] and the relay side [1, N-1].

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mobrelay {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct ScenarioConfig {
  double distance = 2000.0;         // D, metres between source and destination
  double altitude = 100.0;          // H, metres
  double max_speed = 50.0;          // metres / second
  double slot_length = 1.0;         // seconds
  int slot_count = 100;             // N
  double gamma0 = 1e8;              // reference SNR per watt at 1 m
  double avg_power_source = 0.01;   // watts
  double avg_power_relay = 0.01;    // watts
  double noise_power = 1.0;         // watts; only used to derive gamma0 from a reference gain
  std::optional<Point2> start_point;
  std::optional<Point2> end_point;

  double horizon() const { return slot_length * slot_count; }
  // Maximum displacement per slot.
  double step_limit() const { return max_speed * slot_length; }
  double source_energy() const { return slot_count * avg_power_source; }
  double relay_energy() const { return slot_count * avg_power_relay; }
  bool free_endpoints() const { return !start_point && !end_point; }
  // Straight-line distance between configured endpoints (0 when either is free).
  double min_travel_distance() const;

  // Throws ConfigError when an invariant does not hold.
  void validate() const;
};

// Sets slot_count = round(horizon / slot_length) (at least 2), keeping slot_length.
void set_horizon(ScenarioConfig& cfg, double horizon_s);

// Parameters of the reference numerical setup (D = 2 km, H = 100 m, 50 m/s,
// gamma0 = 80 dB, 10 dBm average powers, 1 s slots, no endpoint constraints).
ScenarioConfig reference_setup(double horizon_s = 100.0);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

// 1e-9 * max(1, scale).
double feasibility_tolerance(double scale);

struct Trajectory {
  std::vector<double> x;
  std::vector<double> y;

  Trajectory() = default;
  Trajectory(std::vector<double> xs, std::vector<double> ys);
  static Trajectory constant(std::size_t slots, Point2 p);

  std::size_t size() const { return x.size(); }
  Point2 at(std::size_t i) const { return {x[i], y[i]}; }
};

struct ChannelProfile {
  std::vector<double> gamma_sr;
  std::vector<double> gamma_rd;

  std::size_t size() const { return gamma_sr.size(); }
  // Gains the source can use (slots 1..N-1).
  std::span<const double> source_gains() const;
  // Gains the relay can use (slots 2..N).
  std::span<const double> relay_gains() const;
};

struct PowerSchedule {
  std::vector<double> p_s;
  std::vector<double> p_r;
  std::vector<double> r_s;
  std::vector<double> r_r;

  std::size_t size() const { return p_s.size(); }
};

ChannelProfile channel_profile(const Trajectory& traj, const ScenarioConfig& cfg);

// Builds a channel profile directly from positions on the S-D axis (y = 0).
ChannelProfile channel_profile_on_axis(std::span<const double> x, const ScenarioConfig& cfg);

// log2(1 + power * gain).
double link_rate(double power, double gain);

// Fills r_s and r_r from the powers; forces p_s[N-1] = p_r[0] = 0.
PowerSchedule make_schedule(std::vector<double> p_s, std::vector<double> p_r,
                            const ChannelProfile& channels);

// Same as make_schedule but with relay rates given explicitly (powers are the
// minimum needed for those rates).
PowerSchedule schedule_from_rates(std::vector<double> p_s, std::vector<double> r_r,
                                  const ChannelProfile& channels);

struct MobilityViolation {
  enum class Kind { Start, Step, End };
  Kind kind;
  std::size_t slot;  // 0-based slot index (for Step: displacement slot -> slot + 1)
  double distance;
};

struct MobilityReport {
  std::vector<MobilityViolation> violations;
  bool feasible() const { return violations.empty(); }
};

MobilityReport check_mobility(const Trajectory& traj, const ScenarioConfig& cfg);

// Same check with the endpoint constraints ignored.
MobilityReport check_speed_only(const Trajectory& traj, const ScenarioConfig& cfg);

struct CausalityReport {
  // slack[k] corresponds to slot n = k + 2:
  //   sum_{i=1}^{n-1} r_s[i] - sum_{i=2}^{n} r_r[i]
  std::vector<double> slack;
  double tolerance = 0.0;

  bool feasible() const;
  double min_slack() const;
};

CausalityReport check_causality(const PowerSchedule& schedule);

struct BudgetReport {
  double source_used = 0.0;
  double relay_used = 0.0;
  bool feasible = true;
};

BudgetReport check_budgets(const PowerSchedule& schedule, const ScenarioConfig& cfg);

// Sum of relay rates over slots 2..N.
double throughput(const PowerSchedule& schedule);

// Forward buffer filling: r_r[n] = min(cap[n], backlog before slot n).
// This maximises the delivered total for fixed per-slot caps.
std::vector<double> causal_forwarding(std::span<const double> r_s, std::span<const double> relay_caps);

std::string to_string(MobilityViolation::Kind kind);

}  // namespace mobrelay
