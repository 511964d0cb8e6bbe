#include <gtest/gtest.h>

#include "mobrelay/free_endpoint.hpp"
#include "mobrelay/joint_opt.hpp"

namespace {

using namespace mobrelay;

TEST(Alternate, TracesAreMonotone) {
  ScenarioConfig cfg = reference_setup(40.0);
  cfg.start_point = Point2{1000.0, 500.0};
  cfg.end_point = Point2{1500.0, 500.0};
  const JointResult r = alternate(straight_line(cfg), cfg);
  ASSERT_FALSE(r.failed);
  ASSERT_GE(r.outer_trace.size(), 2u);
  for (std::size_t i = 1; i < r.outer_trace.size(); ++i) {
    EXPECT_GE(r.outer_trace[i], r.outer_trace[i - 1] - 1e-9 * r.outer_trace[i]);
  }
  // Each trajectory half-step starts where the previous power half-step ended.
  for (std::size_t i = 0; i < r.trajectory_trace.size() && i < r.outer_trace.size(); ++i) {
    EXPECT_GE(r.trajectory_trace[i], r.outer_trace[i] - 1e-9 * r.outer_trace[i]);
  }
  EXPECT_TRUE(check_mobility(r.trajectory, cfg).feasible());
  EXPECT_TRUE(check_causality(r.powers.schedule).feasible());
  const BudgetReport b = check_budgets(r.powers.schedule, cfg);
  EXPECT_TRUE(b.feasible);
  EXPECT_NEAR(r.throughput, r.powers.objective, 1e-9 * r.throughput);
}

TEST(Alternate, FixedPointStaysPut) {
  ScenarioConfig cfg = reference_setup(30.0);
  cfg.start_point = Point2{1000.0, 300.0};
  cfg.end_point = Point2{1400.0, 300.0};
  const JointResult first = alternate(straight_line(cfg), cfg);
  ASSERT_FALSE(first.failed);
  JointOptions one;
  one.outer_max = 1;
  const JointResult again = alternate(first.trajectory, cfg, one);
  EXPECT_NEAR(again.throughput, first.throughput, 1e-3 * first.throughput);
  EXPECT_GE(again.throughput, first.throughput - 1e-9 * first.throughput);
}

TEST(Alternate, FreeEndpointOptimumBoundsTrace) {
  const ScenarioConfig cfg = reference_setup(100.0);
  const double bound = solve_free(cfg).throughput;
  const JointResult r = alternate(straight_line(cfg), cfg);
  ASSERT_FALSE(r.failed);
  for (double v : r.outer_trace) EXPECT_LE(v, bound * (1 + 1e-9));
  EXPECT_GE(r.throughput, 0.9 * bound);
}

}  // namespace
