#pragma once

// Interior-point solver for small convex programs
//
//   maximize    c^T z
//   subject to  a_j^T z <= b_j                                   (linear)
//               sum v z_i z_k + q^T z + c_k <= 0                 (convex quadratic)
//               l^T z - sum w log2(1 + g z_i) <= rhs,  w >= 0   (log-rate)
//               lower <= z <= upper
//
// All vectors are given sparsely. The log-rate rows keep rate/power programs
// in their native form instead of forcing them through a quadratic model.
// One log-barrier centring pass is followed by primal-dual path following.

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace mobrelay {

struct SparseTerm {
  int index = 0;
  double coef = 0.0;
};

struct QuadTerm {
  int i = 0;
  int j = 0;
  double coef = 0.0;  // contributes coef * z_i * z_j
};

struct LinearConstraint {
  std::vector<SparseTerm> a;
  double b = 0.0;
};

struct QuadraticConstraint {
  std::vector<QuadTerm> quad;
  std::vector<SparseTerm> q;
  double c = 0.0;

  static QuadraticConstraint dense(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q, double c);
};

struct LogTerm {
  int index = 0;
  double gain = 0.0;
  double weight = 1.0;
};

struct LogRateConstraint {
  std::vector<SparseTerm> linear;
  std::vector<LogTerm> logs;
  double rhs = 0.0;
};

struct QcqpProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;  // maximised
  std::vector<LinearConstraint> linear_constraints;
  std::vector<QuadraticConstraint> quad_constraints;
  std::vector<LogRateConstraint> log_rate_constraints;
  // Empty means unbounded; otherwise one entry per variable (+-infinity allowed).
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  void set_bounds(double lo, double hi);
  // Throws DimensionError / PreconditionError on malformed input or a non-PSD quadratic.
  void validate() const;
};

struct QcqpOptions {
  double tol = 1e-9;
  int max_iters = 500;
  double mu = 10.0;
  // Strictly feasible start; phase 1 runs when absent or not strictly feasible.
  std::optional<Eigen::VectorXd> start;
};

struct QcqpResult {
  Eigen::VectorXd z;
  double objective = 0.0;
  // One multiplier per constraint: linear, quadratic, log-rate, lower bounds, upper bounds
  // (finite bounds only, in variable order).
  Eigen::VectorXd duals;
  int iterations = 0;
  double gap = 0.0;
  double dual_residual = 0.0;
  double max_violation = 0.0;
  bool converged = false;
  bool used_phase1 = false;
};

// Throws InfeasibleError when no strictly feasible point exists and
// NumericalFailure when the Newton systems break down.
QcqpResult solve_qcqp(const QcqpProblem& prob, const QcqpOptions& options = {});

// Largest constraint value at z (<= 0 means feasible).
double max_constraint_value(const QcqpProblem& prob, const Eigen::VectorXd& z);

}  // namespace mobrelay
