#include "mobrelay/traj_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

const double kLog2e = std::numbers::log2e;

void check_lengths(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(cfg.slot_count);
  if (traj.size() != n || traj.y.size() != n) throw DimensionError("trajectory length differs from slot count");
  if (powers.p_s.size() != n || powers.p_r.size() != n) throw DimensionError("power schedule length differs");
}

// Straight path from a to b split into `segments` equal pieces; returns the interior points 1..count.
std::vector<Point2> segment_points(Point2 a, Point2 b, int count, int segments) {
  std::vector<Point2> pts(count);
  for (int k = 0; k < count; ++k) {
    const double t = static_cast<double>(k + 1) / segments;
    pts[k] = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  }
  return pts;
}

}  // namespace

ScaCoefficients sca_coefficients(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg) {
  check_lengths(traj, powers, cfg);
  const std::size_t n = traj.size();
  const double h2 = cfg.altitude * cfg.altitude;
  ScaCoefficients c;
  for (auto* v : {&c.a_s, &c.b_s, &c.c_s, &c.a_r, &c.b_r, &c.c_r, &c.r_s_base, &c.r_r_base}) v->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = traj.x[i];
    const double y = traj.y[i];
    const double dsr = h2 + x * x + y * y;
    const double drd = h2 + (cfg.distance - x) * (cfg.distance - x) + y * y;
    const double gs = std::max(0.0, powers.p_s[i]) * cfg.gamma0;
    const double gr = std::max(0.0, powers.p_r[i]) * cfg.gamma0;
    c.a_s[i] = gs * kLog2e / (dsr * (gs + dsr));
    c.b_s[i] = 2.0 * x * c.a_s[i];
    c.c_s[i] = 2.0 * y * c.a_s[i];
    c.a_r[i] = gr * kLog2e / (drd * (gr + drd));
    c.b_r[i] = -2.0 * (cfg.distance - x) * c.a_r[i];
    c.c_r[i] = 2.0 * y * c.a_r[i];
    c.r_s_base[i] = std::log2(1.0 + gs / dsr);
    c.r_r_base[i] = std::log2(1.0 + gr / drd);
  }
  return c;
}

LowerBoundRates lower_bound_rates(const ScaCoefficients& c, const Increments& inc) {
  const std::size_t n = c.size();
  if (inc.dx.size() != n || inc.dy.size() != n) throw DimensionError("increment length differs from coefficients");
  LowerBoundRates out;
  out.r_s.resize(n);
  out.r_r.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sq = inc.dx[i] * inc.dx[i] + inc.dy[i] * inc.dy[i];
    out.r_s[i] = c.r_s_base[i] - c.a_s[i] * sq - c.b_s[i] * inc.dx[i] - c.c_s[i] * inc.dy[i];
    out.r_r[i] = c.r_r_base[i] - c.a_r[i] * sq - c.b_r[i] * inc.dx[i] - c.c_r[i] * inc.dy[i];
  }
  return out;
}

Increments IncrementProgram::increments(const Eigen::VectorXd& z) const {
  const int n = increment_vars / 2;
  Increments inc;
  inc.dx.resize(n);
  inc.dy.resize(n);
  for (int i = 0; i < n; ++i) {
    inc.dx[i] = scale * z[i];
    inc.dy[i] = scale * z[n + i];
  }
  return inc;
}

IncrementProgram build_increment_qcqp(const ScaCoefficients& c, const Trajectory& traj, const ScenarioConfig& cfg) {
  const int n = static_cast<int>(traj.size());
  if (static_cast<int>(c.size()) != n) throw DimensionError("coefficients and trajectory differ in length");
  if (n < 2) throw DimensionError("at least two slots are needed");
  for (int i = 0; i < n; ++i) {
    if (c.a_s[i] < 0 || c.a_r[i] < 0) throw PreconditionError(fmt::format("negative curvature at slot {}", i));
  }
  const double v = cfg.step_limit();
  const double v2 = v * v;
  auto ux = [](int i) { return i; };
  auto uy = [n](int i) { return n + i; };
  auto rate = [n](int j) { return 2 * n + (j - 1); };  // relay slot j in 1..n-1

  IncrementProgram prog;
  prog.scale = v;
  prog.increment_vars = 2 * n;
  prog.rate_vars = n - 1;
  QcqpProblem& p = prog.problem;
  p.num_vars = 3 * n - 1;
  p.objective = Eigen::VectorXd::Zero(p.num_vars);
  for (int j = 1; j < n; ++j) p.objective[rate(j)] = 1.0;

  auto add_bound_terms = [&](QuadraticConstraint& q, int i, double a, double b, double cc) {
    if (a != 0.0) {
      q.quad.push_back({ux(i), ux(i), a * v2});
      q.quad.push_back({uy(i), uy(i), a * v2});
    }
    if (b != 0.0) q.q.push_back({ux(i), b * v});
    if (cc != 0.0) q.q.push_back({uy(i), cc * v});
  };

  // Cumulative causality: sum_{i<j} r_s_lb[i] >= sum_{1<=i<=j} R[i].
  {
    QuadraticConstraint q;
    double base = 0.0;
    for (int j = 1; j < n; ++j) {
      add_bound_terms(q, j - 1, c.a_s[j - 1], c.b_s[j - 1], c.c_s[j - 1]);
      base += c.r_s_base[j - 1];
      q.q.push_back({rate(j), 1.0});
      q.c = -base;
      p.quad_constraints.push_back(q);
      ++prog.causality_constraints;
    }
  }
  for (int j = 1; j < n; ++j) {
    QuadraticConstraint q;
    add_bound_terms(q, j, c.a_r[j], c.b_r[j], c.c_r[j]);
    q.q.push_back({rate(j), 1.0});
    q.c = -c.r_r_base[j];
    p.quad_constraints.push_back(std::move(q));
    ++prog.rate_constraints;
  }

  // |(q_k + V u_k) - (q_i + V u_i)|^2 <= V^2, divided through by V^2.
  auto add_pair = [&](int k, int i, double ex, double ey) {
    QuadraticConstraint q;
    for (auto [vk, vi, e] : {std::tuple{ux(k), ux(i), ex}, std::tuple{uy(k), uy(i), ey}}) {
      q.quad.push_back({vk, vk, 1.0});
      q.quad.push_back({vi, vi, 1.0});
      q.quad.push_back({vk, vi, -2.0});
      q.q.push_back({vk, 2.0 * e});
      q.q.push_back({vi, -2.0 * e});
    }
    q.c = ex * ex + ey * ey - 1.0;
    p.quad_constraints.push_back(std::move(q));
    ++prog.mobility_constraints;
  };
  auto add_anchor = [&](int k, double ex, double ey) {
    QuadraticConstraint q;
    q.quad.push_back({ux(k), ux(k), 1.0});
    q.quad.push_back({uy(k), uy(k), 1.0});
    q.q.push_back({ux(k), 2.0 * ex});
    q.q.push_back({uy(k), 2.0 * ey});
    q.c = ex * ex + ey * ey - 1.0;
    p.quad_constraints.push_back(std::move(q));
    ++prog.mobility_constraints;
  };
  if (cfg.start_point) add_anchor(0, (traj.x[0] - cfg.start_point->x) / v, (traj.y[0] - cfg.start_point->y) / v);
  for (int i = 0; i + 1 < n; ++i) {
    add_pair(i + 1, i, (traj.x[i + 1] - traj.x[i]) / v, (traj.y[i + 1] - traj.y[i]) / v);
  }
  if (cfg.end_point) {
    add_anchor(n - 1, (traj.x[n - 1] - cfg.end_point->x) / v, (traj.y[n - 1] - cfg.end_point->y) / v);
  }

  // Strictly feasible start: a small step towards a reference path with slack in every ball.
  std::vector<Point2> ref(n);
  if (cfg.start_point && cfg.end_point) {
    ref = segment_points(*cfg.start_point, *cfg.end_point, n, n + 1);
  } else {
    Point2 anchor{0.0, 0.0};
    if (cfg.start_point) {
      anchor = *cfg.start_point;
    } else if (cfg.end_point) {
      anchor = *cfg.end_point;
    } else {
      for (int i = 0; i < n; ++i) {
        anchor.x += traj.x[i] / n;
        anchor.y += traj.y[i] / n;
      }
    }
    std::fill(ref.begin(), ref.end(), anchor);
  }
  const double theta = 1e-2;
  prog.start = Eigen::VectorXd::Zero(p.num_vars);
  Increments inc;
  inc.dx.resize(n);
  inc.dy.resize(n);
  for (int i = 0; i < n; ++i) {
    inc.dx[i] = theta * (ref[i].x - traj.x[i]);
    inc.dy[i] = theta * (ref[i].y - traj.y[i]);
    prog.start[ux(i)] = inc.dx[i] / v;
    prog.start[uy(i)] = inc.dy[i] / v;
  }
  const LowerBoundRates lb = lower_bound_rates(c, inc);
  const std::vector<double> fwd = causal_forwarding(lb.r_s, lb.r_r);
  double peak = 0.0;
  for (int j = 0; j < n; ++j) peak = std::max({peak, std::abs(lb.r_s[j]), std::abs(lb.r_r[j])});
  // Half the forwarded rates keeps the start well centred in the rate and causality rows.
  const double margin = 1e-3 * (1.0 + peak) / n;
  for (int j = 1; j < n; ++j) prog.start[rate(j)] = 0.5 * fwd[j] - margin;
  return prog;
}

PowerSchedule forwarded_schedule(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg) {
  check_lengths(traj, powers, cfg);
  const ChannelProfile ch = channel_profile(traj, cfg);
  const PowerSchedule raw = make_schedule(powers.p_s, powers.p_r, ch);
  return schedule_from_rates(raw.p_s, causal_forwarding(raw.r_s, raw.r_r), ch);
}

double exact_throughput(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg) {
  return throughput(forwarded_schedule(traj, powers, cfg));
}

ScaStep sca_step(const Trajectory& traj, const PowerSchedule& powers, const ScenarioConfig& cfg,
                 std::optional<double> previous_exact) {
  const double current = previous_exact ? *previous_exact : exact_throughput(traj, powers, cfg);
  ScaStep out;
  out.trajectory = traj;
  out.objective_exact = current;
  out.objective_lb = current;

  const ScaCoefficients coeffs = sca_coefficients(traj, powers, cfg);
  const IncrementProgram prog = build_increment_qcqp(coeffs, traj, cfg);
  QcqpResult res;
  try {
    QcqpOptions opt;
    opt.tol = 1e-10;
    opt.start = prog.start;
    res = solve_qcqp(prog.problem, opt);
  } catch (const NumericalFailure&) {
    out.solver_failed = true;
    out.accepted = false;
    return out;
  } catch (const InfeasibleError&) {
    out.solver_failed = true;
    out.accepted = false;
    return out;
  }
  const Increments inc = prog.increments(res.z);
  Trajectory next = traj;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    next.x[i] += inc.dx[i];
    next.y[i] += inc.dy[i];
  }
  if (!check_mobility(next, cfg).feasible()) {
    out.solver_failed = true;
    out.accepted = false;
    return out;
  }
  const double exact = exact_throughput(next, powers, cfg);
  if (exact < current) {
    out.accepted = false;
    return out;
  }
  out.trajectory = std::move(next);
  out.objective_lb = res.objective;
  out.objective_exact = exact;
  return out;
}

TrajResult optimize_trajectory(const Trajectory& init, const PowerSchedule& powers, const ScenarioConfig& cfg,
                               const TrajOptions& options) {
  TrajResult out;
  out.trajectory = init;
  double current = exact_throughput(init, powers, cfg);
  out.trace.push_back({0, current, current});
  for (int it = 1; it <= options.max_iters; ++it) {
    const ScaStep step = sca_step(out.trajectory, powers, cfg, current);
    if (step.solver_failed) {
      out.failed = true;
      break;
    }
    out.trace.push_back({it, step.objective_lb, step.objective_exact});
    if (!step.accepted) {
      out.converged = true;
      break;
    }
    const double change = (step.objective_exact - current) / std::max(std::abs(current), 1e-300);
    out.trajectory = step.trajectory;
    current = step.objective_exact;
    if (change < options.rel_tol) {
      out.converged = true;
      break;
    }
  }
  out.schedule = forwarded_schedule(out.trajectory, powers, cfg);
  out.throughput = throughput(out.schedule);
  return out;
}

Trajectory straight_line(const ScenarioConfig& cfg) {
  const int n = cfg.slot_count;
  const double v = cfg.step_limit();
  std::vector<Point2> pts;
  if (cfg.start_point && cfg.end_point) {
    pts = segment_points(*cfg.start_point, *cfg.end_point, n, n + 1);
  } else if (cfg.start_point || cfg.end_point) {
    const Point2 a = cfg.start_point ? *cfg.start_point : Point2{0.0, 0.0};
    const Point2 b = cfg.end_point ? *cfg.end_point : Point2{cfg.distance, 0.0};
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double step = len > 0 ? std::min(len / (n + 1), v) : 0.0;
    const double ux = len > 0 ? (b.x - a.x) / len : 0.0;
    const double uy = len > 0 ? (b.y - a.y) / len : 0.0;
    pts.resize(n);
    for (int k = 0; k < n; ++k) {
      // Anchor the line at whichever endpoint is configured.
      const double t = cfg.start_point ? (k + 1) * step : len - (n - k) * step;
      pts[k] = {a.x + t * ux, a.y + t * uy};
    }
  } else {
    const double len = std::min(cfg.distance, (n - 1) * v);
    const double x0 = 0.5 * (cfg.distance - len);
    pts.resize(n);
    for (int k = 0; k < n; ++k) pts[k] = {x0 + len * k / (n - 1), 0.0};
  }
  Trajectory t;
  for (const auto& p : pts) {
    t.x.push_back(p.x);
    t.y.push_back(p.y);
  }
  return t;
}

PowerSchedule equal_powers(const ScenarioConfig& cfg) {
  const int n = cfg.slot_count;
  PowerSchedule s;
  s.p_s.assign(n, cfg.source_energy() / (n - 1));
  s.p_r.assign(n, cfg.relay_energy() / (n - 1));
  s.p_s[n - 1] = 0.0;
  s.p_r[0] = 0.0;
  s.r_s.assign(n, 0.0);
  s.r_r.assign(n, 0.0);
  return s;
}

}  // namespace mobrelay
