#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "instances.hpp"
#include "mobrelay/power_opt.hpp"
#include "mobrelay/traj_opt.hpp"
#include "oracles.hpp"

namespace {

using namespace mobrelay;

ScenarioConfig with_endpoints(double horizon) {
  ScenarioConfig cfg = reference_setup(horizon);
  cfg.start_point = Point2{1000.0, 500.0};
  cfg.end_point = Point2{1500.0, 500.0};
  return cfg;
}

TEST(ScaCoefficients, AboveSourceHasNoLinearTerm) {
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 3);
  const Trajectory t({0.0, 1000.0, 2000.0}, {0.0, 0.0, 0.0});
  const PowerSchedule p = make_schedule({0.01, 0.01, 0.0}, {0.0, 0.01, 0.01}, channel_profile(t, cfg));
  const ScaCoefficients c = sca_coefficients(t, p, cfg);
  EXPECT_EQ(c.b_s[0], 0.0);
  EXPECT_EQ(c.c_s[0], 0.0);
  EXPECT_GT(c.a_s[0], 0.0);
  EXPECT_EQ(c.b_r[2], 0.0);
  EXPECT_EQ(c.c_r[2], 0.0);
}

TEST(ScaCoefficients, ZeroPowerGivesZeroCoefficients) {
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 3);
  const Trajectory t({300.0, 900.0, 1700.0}, {40.0, -20.0, 10.0});
  const PowerSchedule p = make_schedule({0.0, 0.02, 0.0}, {0.0, 0.0, 0.03}, channel_profile(t, cfg));
  const ScaCoefficients c = sca_coefficients(t, p, cfg);
  EXPECT_EQ(c.a_s[0], 0.0);
  EXPECT_EQ(c.b_s[0], 0.0);
  EXPECT_EQ(c.c_s[0], 0.0);
  EXPECT_EQ(c.a_r[1], 0.0);
  EXPECT_EQ(c.r_r_base[1], 0.0);
}

TEST(ScaCoefficients, MidpointAgainstFiniteDifferences) {
  ScenarioConfig cfg = instances::with_slots(reference_setup(), 2);
  cfg.gamma0 = 1e6;
  const Trajectory t({1000.0, 1000.0}, {0.0, 0.0});
  const PowerSchedule p = make_schedule({1.0, 0.0}, {0.0, 1.0}, channel_profile(t, cfg));
  const ScaCoefficients c = sca_coefficients(t, p, cfg);
  const double d2 = 100.0 * 100.0 + 1000.0 * 1000.0;
  EXPECT_NEAR(c.a_s[0], 1e6 * std::log2(std::exp(1.0)) / (d2 * (1e6 + d2)), 1e-18);
  const oracle::Gradient gs = oracle::rate_gradient(1000.0, 0.0, 0.0, 1e6, 100.0, 1e-3);
  const oracle::Gradient gr = oracle::rate_gradient(1000.0, 0.0, 2000.0, 1e6, 100.0, 1e-3);
  EXPECT_NEAR(-c.b_s[0], gs.dx, 1e-6 * std::abs(gs.dx));
  EXPECT_NEAR(-c.b_r[1], gr.dx, 1e-6 * std::abs(gr.dx));
  EXPECT_GT(c.b_s[0], 0.0);
  EXPECT_LT(c.b_r[1], 0.0);
}

TEST(LowerBoundRates, ZeroIncrementIsExact) {
  std::mt19937_64 rng(21);
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 7);
  const Trajectory t = instances::random_walk(cfg, rng);
  const PowerSchedule p = equal_powers(cfg);
  const ScaCoefficients c = sca_coefficients(t, p, cfg);
  const LowerBoundRates lb = lower_bound_rates(c, Increments{std::vector<double>(7, 0.0), std::vector<double>(7, 0.0)});
  for (int n = 0; n < 7; ++n) {
    EXPECT_EQ(lb.r_s[n], c.r_s_base[n]);
    EXPECT_EQ(lb.r_r[n], c.r_r_base[n]);
  }
}

TEST(LowerBoundRates, NeverAboveTrueRate) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const Trajectory t = instances::random_walk(cfg, rng);
    const PowerSchedule p = equal_powers(cfg);
    const ScaCoefficients c = sca_coefficients(t, p, cfg);
    Increments inc;
    for (int n = 0; n < 6; ++n) {
      inc.dx.push_back(300.0 * u(rng));
      inc.dy.push_back(300.0 * u(rng));
    }
    const LowerBoundRates lb = lower_bound_rates(c, inc);
    for (int n = 0; n < 6; ++n) {
      const double x = t.x[n] + inc.dx[n];
      const double y = t.y[n] + inc.dy[n];
      EXPECT_LE(lb.r_s[n], oracle::link_rate_at(x, y, 0.0, p.p_s[n] * cfg.gamma0, cfg.altitude) + 1e-9);
      EXPECT_LE(lb.r_r[n], oracle::link_rate_at(x, y, cfg.distance, p.p_r[n] * cfg.gamma0, cfg.altitude) + 1e-9);
    }
  }
}

TEST(LowerBoundRates, MovingTowardSourceRaisesSourceBound) {
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 2);
  const Trajectory t({2000.0, 2000.0}, {0.0, 0.0});
  const PowerSchedule p = equal_powers(cfg);
  const ScaCoefficients c = sca_coefficients(t, p, cfg);
  const LowerBoundRates lb = lower_bound_rates(c, Increments{{-50.0, 0.0}, {0.0, 0.0}});
  EXPECT_GT(lb.r_s[0], c.r_s_base[0]);
  EXPECT_GT(oracle::link_rate_at(1950.0, 0.0, 0.0, p.p_s[0] * cfg.gamma0, cfg.altitude), lb.r_s[0]);
}

TEST(IncrementProgram, CountsForThreeSlots) {
  ScenarioConfig cfg = with_endpoints(3.0);
  cfg.end_point = Point2{1080.0, 500.0};
  const Trajectory t = straight_line(cfg);
  const ScaCoefficients c = sca_coefficients(t, equal_powers(cfg), cfg);
  const IncrementProgram prog = build_increment_qcqp(c, t, cfg);
  EXPECT_EQ(prog.problem.num_vars, 8);
  EXPECT_EQ(prog.increment_vars, 6);
  EXPECT_EQ(prog.rate_vars, 2);
  EXPECT_EQ(prog.mobility_constraints, 4);
  EXPECT_EQ(prog.causality_constraints, 2);
  EXPECT_EQ(prog.rate_constraints, 2);
  EXPECT_NO_THROW(prog.problem.validate());
}

TEST(IncrementProgram, FreeEndpointsDropEndpointBalls) {
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 3);
  const Trajectory t = straight_line(cfg);
  const IncrementProgram prog = build_increment_qcqp(sca_coefficients(t, equal_powers(cfg), cfg), t, cfg);
  EXPECT_EQ(prog.mobility_constraints, 2);
}

TEST(IncrementProgram, NullStepIsFeasible) {
  const ScenarioConfig cfg = with_endpoints(12.0);
  const Trajectory t = straight_line(cfg);
  const PowerSchedule p = equal_powers(cfg);
  const IncrementProgram prog = build_increment_qcqp(sca_coefficients(t, p, cfg), t, cfg);
  const PowerSchedule fwd = forwarded_schedule(t, p, cfg);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(prog.problem.num_vars);
  for (int k = 0; k < prog.rate_vars; ++k) z[prog.increment_vars + k] = fwd.r_r[k + 1];
  EXPECT_LE(max_constraint_value(prog.problem, z), 1e-9);
  EXPECT_NEAR(prog.problem.objective.dot(z), exact_throughput(t, p, cfg), 1e-9);
  EXPECT_LT(max_constraint_value(prog.problem, prog.start), 0.0);
}

TEST(ScaStep, ImprovesStraightLineAndKeepsMobility) {
  const ScenarioConfig cfg = with_endpoints(20.0);
  const Trajectory t = straight_line(cfg);
  const PowerSchedule p = equal_powers(cfg);
  const double before = exact_throughput(t, p, cfg);
  const ScaStep s = sca_step(t, p, cfg);
  ASSERT_FALSE(s.solver_failed);
  EXPECT_GT(s.objective_exact, before);
  EXPECT_GE(s.objective_exact, s.objective_lb - 1e-9);
  EXPECT_GE(s.objective_lb, before - 1e-9);
  EXPECT_TRUE(check_mobility(s.trajectory, cfg).feasible());
}

TEST(OptimizeTrajectory, MonotoneTraceAndFixedPoint) {
  const ScenarioConfig cfg = with_endpoints(40.0);
  const PowerSchedule p = equal_powers(cfg);
  const TrajResult r = optimize_trajectory(straight_line(cfg), p, cfg);
  ASSERT_FALSE(r.failed);
  EXPECT_TRUE(r.converged);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i].exact, r.trace[i - 1].exact - 1e-9);
  EXPECT_TRUE(check_mobility(r.trajectory, cfg).feasible());
  EXPECT_NEAR(r.throughput, exact_throughput(r.trajectory, p, cfg), 1e-9);

  const ScaStep again = sca_step(r.trajectory, p, cfg, r.throughput);
  EXPECT_NEAR(again.objective_exact, r.throughput, 1e-3 * r.throughput);
}

TEST(OptimizeTrajectory, DetourAndBinarySpeed) {
  const ScenarioConfig cfg = with_endpoints(100.0);
  const TrajResult r = optimize_trajectory(straight_line(cfg), equal_powers(cfg), cfg);
  ASSERT_FALSE(r.failed);
  const auto [lo, hi] = std::minmax_element(r.trajectory.x.begin(), r.trajectory.x.end());
  EXPECT_LT(*lo, 1000.0);
  EXPECT_GT(*hi, 1500.0);
  EXPECT_LE(r.trace.size(), 21u);
  const double v = cfg.step_limit();
  int binary = 0;
  const int moves = cfg.slot_count - 1;
  for (int n = 0; n < moves; ++n) {
    const double s = std::hypot(r.trajectory.x[n + 1] - r.trajectory.x[n], r.trajectory.y[n + 1] - r.trajectory.y[n]);
    binary += s < 0.05 * v || std::abs(s - v) < 0.05 * v;
  }
  EXPECT_GE(binary, 0.9 * moves);
}

TEST(EqualPowers, SpreadsBudgets) {
  const ScenarioConfig cfg = instances::with_slots(reference_setup(), 5);
  const PowerSchedule p = equal_powers(cfg);
  EXPECT_EQ(p.p_s[4], 0.0);
  EXPECT_EQ(p.p_r[0], 0.0);
  EXPECT_NEAR(p.p_s[0] * 4, cfg.source_energy(), 1e-15);
  EXPECT_NEAR(p.p_r[3] * 4, cfg.relay_energy(), 1e-15);
}

TEST(StraightLine, EndpointsAndSpeed) {
  const ScenarioConfig cfg = with_endpoints(30.0);
  const Trajectory t = straight_line(cfg);
  EXPECT_TRUE(check_mobility(t, cfg).feasible());
  const ScenarioConfig free = reference_setup(30.0);
  const Trajectory f = straight_line(free);
  EXPECT_TRUE(check_speed_only(f, free).feasible());
  EXPECT_NEAR(f.x.front() + f.x.back(), free.distance, 1e-9);
}

}  // namespace
