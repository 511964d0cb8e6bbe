#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace mobrelay {

struct EllipsoidCut {
  enum class Kind { Objective, Feasibility };
  Kind kind = Kind::Objective;
  // Objective: f(center). Feasibility: constraint violation h(center) > 0.
  double value = 0.0;
  Eigen::VectorXd subgradient;
  // Optional value of a known feasible primal point (a lower bound on min f).
  std::optional<double> lower_bound;
};

using EllipsoidOracle = std::function<EllipsoidCut(const Eigen::VectorXd&)>;

// E = { c + A u : |u| <= 1 }, shape matrix P = A A^T.
struct EllipsoidState {
  Eigen::VectorXd center;
  Eigen::MatrixXd factor;
  long iteration = 0;
  double log_volume = 0.0;  // log det A, up to the unit-ball constant

  Eigen::MatrixXd shape_matrix() const { return factor * factor.transpose(); }
};

struct EllipsoidOptions {
  long max_iters = 10000;
  // Stop once best - lower_bound <= tol * max(1, |best|).
  double tol = 1e-9;
  bool deep_cuts = true;
  bool record_trace = false;
};

struct EllipsoidTraceEntry {
  EllipsoidCut::Kind kind;
  double value;
  double log_volume;
};

struct EllipsoidResult {
  Eigen::VectorXd best_point;
  double best_value = 0.0;
  double lower_bound = 0.0;
  long iterations = 0;
  bool converged = false;
  bool hit_iteration_cap = false;
  std::vector<EllipsoidTraceEntry> trace;
};

// Minimises a convex function over a convex set described by feasibility cuts.
// Throws NumericalFailure if the ellipsoid degenerates.
EllipsoidResult ellipsoid_minimize(const EllipsoidOracle& oracle, const Eigen::VectorXd& initial_center,
                                   double initial_radius, const EllipsoidOptions& options = {});

// Most violated constraint of { x >= 0, sum x <= cap }, if any.
std::optional<EllipsoidCut> capped_simplex_cut(const Eigen::VectorXd& x, double cap = 1.0);

}  // namespace mobrelay
