#include "mobrelay/convex/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kInvLn2 = 1.0 / std::log(2.0);

// Any constraint, in local coordinates over its support:
//   f(z) = lin . z + constant + sum v z_a z_b - sum w log2(1 + g z_k)
struct Row {
  std::vector<int> support;
  std::vector<double> lin;
  double constant = 0.0;
  std::vector<QuadTerm> quad;
  std::vector<LogTerm> logs;
};

class RowBuilder {
 public:
  int local(int global) {
    auto [it, fresh] = index_.try_emplace(global, static_cast<int>(row_.support.size()));
    if (fresh) {
      row_.support.push_back(global);
      row_.lin.push_back(0.0);
    }
    return it->second;
  }
  void add_linear(int global, double coef) { row_.lin[local(global)] += coef; }
  void add_quad(int gi, int gj, double coef) { row_.quad.push_back({local(gi), local(gj), coef}); }
  void add_log(int global, double gain, double weight) { row_.logs.push_back({local(global), gain, weight}); }
  void add_constant(double c) { row_.constant += c; }
  Row take() { return std::move(row_); }

 private:
  Row row_;
  std::map<int, int> index_;
};

void check_index(int idx, int n) {
  if (idx < 0 || idx >= n) throw DimensionError(fmt::format("variable index {} outside [0, {})", idx, n));
}

std::vector<Row> lower_rows(const QcqpProblem& p) {
  std::vector<Row> rows;
  for (const auto& c : p.linear_constraints) {
    RowBuilder b;
    for (const auto& t : c.a) b.add_linear(t.index, t.coef);
    b.add_constant(-c.b);
    rows.push_back(b.take());
  }
  for (const auto& c : p.quad_constraints) {
    RowBuilder b;
    for (const auto& t : c.quad) b.add_quad(t.i, t.j, t.coef);
    for (const auto& t : c.q) b.add_linear(t.index, t.coef);
    b.add_constant(c.c);
    rows.push_back(b.take());
  }
  for (const auto& c : p.log_rate_constraints) {
    RowBuilder b;
    for (const auto& t : c.linear) b.add_linear(t.index, t.coef);
    for (const auto& t : c.logs) b.add_log(t.index, t.gain, t.weight);
    b.add_constant(-c.rhs);
    rows.push_back(b.take());
  }
  if (p.lower.size() > 0) {
    for (int i = 0; i < p.num_vars; ++i) {
      if (std::isfinite(p.lower[i])) {
        RowBuilder b;
        b.add_linear(i, -1.0);
        b.add_constant(p.lower[i]);
        rows.push_back(b.take());
      }
    }
  }
  if (p.upper.size() > 0) {
    for (int i = 0; i < p.num_vars; ++i) {
      if (std::isfinite(p.upper[i])) {
        RowBuilder b;
        b.add_linear(i, 1.0);
        b.add_constant(-p.upper[i]);
        rows.push_back(b.take());
      }
    }
  }
  return rows;
}

// Value and local gradient; +inf outside the log domain.
double eval_row(const Row& r, const Eigen::VectorXd& z, std::vector<double>* grad) {
  const std::size_t k = r.support.size();
  double f = r.constant;
  if (grad) grad->assign(r.lin.begin(), r.lin.end());
  for (std::size_t a = 0; a < k; ++a) f += r.lin[a] * z[r.support[a]];
  for (const auto& q : r.quad) {
    const double zi = z[r.support[q.i]];
    const double zj = z[r.support[q.j]];
    f += q.coef * zi * zj;
    if (grad) {
      (*grad)[q.i] += q.coef * zj;
      (*grad)[q.j] += q.coef * zi;
    }
  }
  for (const auto& t : r.logs) {
    const double arg = 1.0 + t.gain * z[r.support[t.index]];
    if (!(arg > 0)) return kInf;
    f -= t.weight * std::log2(arg);
    if (grad) (*grad)[t.index] -= t.weight * t.gain * kInvLn2 / arg;
  }
  return f;
}

// Adds scale * Hessian of the row into H.
void add_row_hessian(const Row& r, const Eigen::VectorXd& z, double scale, Eigen::MatrixXd& H) {
  for (const auto& q : r.quad) {
    const int gi = r.support[q.i];
    const int gj = r.support[q.j];
    H(gi, gj) += scale * q.coef;
    H(gj, gi) += scale * q.coef;
  }
  for (const auto& t : r.logs) {
    const int g = r.support[t.index];
    const double arg = 1.0 + t.gain * z[g];
    H(g, g) += scale * t.weight * t.gain * t.gain * kInvLn2 / (arg * arg);
  }
}

struct BarrierOutcome {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;
  int iterations = 0;
  double gap = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

// Log-barrier path following for max c^T z s.t. rows(z) <= 0 from a strictly feasible z.
// Each centering step minimizes -t c^T z - sum log(-f_i) by damped Newton.
BarrierOutcome barrier(const std::vector<Row>& rows, const Eigen::VectorXd& c, Eigen::VectorXd z,
                       const QcqpOptions& opt, const std::function<bool(const Eigen::VectorXd&)>& early_stop,
                       bool center_only = false) {
  const int n = static_cast<int>(z.size());
  const int m = static_cast<int>(rows.size());
  if (m == 0) throw NumericalFailure("unconstrained linear objective is unbounded");

  std::vector<std::vector<double>> grads(m);
  Eigen::VectorXd f(m);
  auto evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd& fx, bool with_grad) {
    for (int i = 0; i < m; ++i) fx[i] = eval_row(rows[i], x, with_grad ? &grads[i] : nullptr);
  };
  auto merit = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& fx, double t) {
    double v = -t * c.dot(x);
    for (int i = 0; i < m; ++i) v -= std::log(-fx[i]);
    return v;
  };
  auto barrier_gradient = [&](const Eigen::VectorXd& fx) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
      for (std::size_t a = 0; a < rows[i].support.size(); ++a) g[rows[i].support[a]] += grads[i][a] / (-fx[i]);
    }
    return g;
  };

  evaluate(z, f, true);
  if (!(f.maxCoeff() < 0)) throw NumericalFailure("interior-point start is not strictly feasible");

  // Initial weight balancing the objective against the barrier gradient.
  double t = 1.0;
  {
    const Eigen::VectorXd gb = barrier_gradient(f);
    const double cc = c.squaredNorm();
    if (cc > 0) {
      const double fit = c.dot(gb) / cc;
      if (fit > 0 && std::isfinite(fit)) t = fit;
    }
    t = std::clamp(t, 1e-8, 1e8);
  }

  BarrierOutcome out;
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd grad(n);
  Eigen::VectorXd zn(n);
  Eigen::VectorXd fn(m);
  bool stop = false;
  while (!stop) {
    for (int inner = 0; inner < 100; ++inner) {
      if (out.iterations >= opt.max_iters) {
        stop = true;
        break;
      }
      ++out.iterations;
      H.setZero();
      grad = -t * c;
      for (int i = 0; i < m; ++i) {
        const Row& r = rows[i];
        const double inv = 1.0 / (-f[i]);
        add_row_hessian(r, z, inv, H);
        const auto& g = grads[i];
        for (std::size_t a = 0; a < r.support.size(); ++a) {
          if (g[a] == 0.0) continue;
          const int ga = r.support[a];
          grad[ga] += g[a] * inv;
          for (std::size_t b = 0; b < r.support.size(); ++b) H(ga, r.support[b]) += inv * inv * g[a] * g[b];
        }
      }
      const double ridge = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      H.diagonal().array() += ridge;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() != Eigen::Success) throw NumericalFailure("Newton system factorization failed");
      const Eigen::VectorXd dz = -ldlt.solve(grad);
      if (!dz.allFinite()) throw NumericalFailure("Newton step is not finite");
      const double decrement = -grad.dot(dz);
      if (decrement <= 2e-10) break;

      const double f0 = merit(z, f, t);
      double s = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 80; ++ls) {
        zn = z + s * dz;
        evaluate(zn, fn, false);
        if (fn.maxCoeff() < 0 && merit(zn, fn, t) <= f0 - 0.01 * s * decrement) {
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) break;  // centered to the attainable precision
      z = zn;
      evaluate(z, f, true);
      if (early_stop && early_stop(z)) {
        out.converged = true;
        stop = true;
        break;
      }
    }
    if (stop) break;
    if (center_only) break;
    if (m / t <= opt.tol * std::max(1.0, std::abs(c.dot(z)))) {
      out.converged = true;
      break;
    }
    t *= opt.mu;
  }

  evaluate(z, f, true);
  out.z = z;
  out.lambda.resize(m);
  for (int i = 0; i < m; ++i) out.lambda[i] = 1.0 / (-t * f[i]);
  out.gap = -f.dot(out.lambda);
  Eigen::VectorXd rd = -c;
  for (int i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < rows[i].support.size(); ++a) rd[rows[i].support[a]] += out.lambda[i] * grads[i][a];
  }
  out.dual_residual = rd.lpNorm<Eigen::Infinity>();
  return out;
}


// Primal-dual path following from a strictly feasible z with multipliers lambda > 0.
BarrierOutcome primal_dual(const std::vector<Row>& rows, const Eigen::VectorXd& c, Eigen::VectorXd z,
                           Eigen::VectorXd lambda, int iterations, const QcqpOptions& opt) {
  const int n = static_cast<int>(z.size());
  const int m = static_cast<int>(rows.size());
  const double feas_tol = std::max(opt.tol, 1e-11) * std::max(1.0, c.lpNorm<Eigen::Infinity>());

  std::vector<std::vector<double>> grads(m);
  Eigen::VectorXd f(m);
  auto evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd& fx, bool with_grad) {
    for (int i = 0; i < m; ++i) fx[i] = eval_row(rows[i], x, with_grad ? &grads[i] : nullptr);
  };
  auto dual_residual = [&](const Eigen::VectorXd& lam) {
    Eigen::VectorXd r = -c;
    for (int i = 0; i < m; ++i) {
      for (std::size_t a = 0; a < rows[i].support.size(); ++a) r[rows[i].support[a]] += lam[i] * grads[i][a];
    }
    return r;
  };

  evaluate(z, f, true);
  BarrierOutcome out;
  out.iterations = iterations;
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd rhs(n);
  Eigen::VectorXd zn(n);
  Eigen::VectorXd ln(m);
  Eigen::VectorXd fn(m);
  for (; out.iterations < opt.max_iters; ++out.iterations) {
    const double gap = -f.dot(lambda);
    const double t = opt.mu * m / gap;
    const Eigen::VectorXd rd = dual_residual(lambda);
    if (rd.lpNorm<Eigen::Infinity>() <= feas_tol && gap <= opt.tol * std::max(1.0, std::abs(c.dot(z)))) {
      out.converged = true;
      break;
    }

    H.setZero();
    rhs = c;
    for (int i = 0; i < m; ++i) {
      const Row& r = rows[i];
      const double w = lambda[i] / (-f[i]);
      add_row_hessian(r, z, lambda[i], H);
      const auto& g = grads[i];
      for (std::size_t a = 0; a < r.support.size(); ++a) {
        if (g[a] == 0.0) continue;
        const int ga = r.support[a];
        rhs[ga] -= g[a] / (t * (-f[i]));
        for (std::size_t b = 0; b < r.support.size(); ++b) H(ga, r.support[b]) += w * g[a] * g[b];
      }
    }
    const double ridge = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success) throw NumericalFailure("Newton system factorization failed");
    const Eigen::VectorXd dz = ldlt.solve(rhs);
    if (!dz.allFinite()) throw NumericalFailure("Newton step is not finite");

    Eigen::VectorXd dl(m);
    for (int i = 0; i < m; ++i) {
      double gdz = 0.0;
      for (std::size_t a = 0; a < rows[i].support.size(); ++a) gdz += grads[i][a] * dz[rows[i].support[a]];
      dl[i] = (-lambda[i] * f[i] - 1.0 / t - lambda[i] * gdz) / f[i];
    }
    auto residual_norm = [&](const Eigen::VectorXd& lam, const Eigen::VectorXd& fx, const Eigen::VectorXd& rdual) {
      double s = rdual.squaredNorm();
      for (int i = 0; i < m; ++i) {
        const double rc = -lam[i] * fx[i] - 1.0 / t;
        s += rc * rc;
      }
      return std::sqrt(s);
    };
    const double r0 = residual_norm(lambda, f, rd);

    double smax = 1.0;
    for (int i = 0; i < m; ++i) {
      if (dl[i] < 0) smax = std::min(smax, -lambda[i] / dl[i]);
    }
    double s = 0.99 * smax;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      zn = z + s * dz;
      ln = lambda + s * dl;
      evaluate(zn, fn, false);
      if (fn.maxCoeff() < 0) {
        evaluate(zn, fn, true);
        if (residual_norm(ln, fn, dual_residual(ln)) <= (1.0 - 0.01 * s) * r0) {
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) {
      evaluate(z, f, true);
      break;  // stalled at the attainable precision
    }
    z = zn;
    lambda = ln;
    f = fn;
  }
  evaluate(z, f, true);
  out.z = z;
  out.lambda = lambda;
  out.gap = -f.dot(lambda);
  out.dual_residual = dual_residual(lambda).lpNorm<Eigen::Infinity>();
  return out;
}

double max_row(const std::vector<Row>& rows, const Eigen::VectorXd& z) {
  double worst = -kInf;
  for (const auto& r : rows) worst = std::max(worst, eval_row(r, z, nullptr));
  return worst;
}

void check_psd(const QuadraticConstraint& qc, int n) {
  if (qc.quad.empty()) return;
  RowBuilder b;
  for (const auto& t : qc.quad) {
    check_index(t.i, n);
    check_index(t.j, n);
    b.add_quad(t.i, t.j, t.coef);
  }
  const Row r = b.take();
  const int k = static_cast<int>(r.support.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(k, k);
  for (const auto& t : r.quad) {
    Q(t.i, t.j) += 0.5 * t.coef;
    Q(t.j, t.i) += 0.5 * t.coef;
  }
  const double scale = std::max(1e-300, Q.cwiseAbs().maxCoeff());
  const double floor = -1e-12 * scale;
  bool diagonal = true;
  for (const auto& t : r.quad) diagonal = diagonal && t.i == t.j;
  if (diagonal) {
    if (Q.diagonal().minCoeff() < floor) throw PreconditionError("quadratic constraint matrix is not PSD");
    return;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < floor) {
    throw PreconditionError("quadratic constraint matrix is not PSD");
  }
}

}  // namespace

QuadraticConstraint QuadraticConstraint::dense(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q, double c) {
  if (Q.rows() != Q.cols() || Q.rows() != q.size()) throw DimensionError("dense quadratic constraint dimensions");
  QuadraticConstraint out;
  for (int i = 0; i < Q.rows(); ++i) {
    for (int j = 0; j < Q.cols(); ++j) {
      if (Q(i, j) != 0.0) out.quad.push_back({i, j, Q(i, j)});
    }
    if (q[i] != 0.0) out.q.push_back({i, q[i]});
  }
  out.c = c;
  return out;
}

void QcqpProblem::set_bounds(double lo, double hi) {
  lower = Eigen::VectorXd::Constant(num_vars, lo);
  upper = Eigen::VectorXd::Constant(num_vars, hi);
}

void QcqpProblem::validate() const {
  if (num_vars <= 0) throw DimensionError("problem needs at least one variable");
  if (objective.size() != num_vars) throw DimensionError("objective length differs from num_vars");
  if (lower.size() != 0 && lower.size() != num_vars) throw DimensionError("lower bound length");
  if (upper.size() != 0 && upper.size() != num_vars) throw DimensionError("upper bound length");
  for (const auto& c : linear_constraints) {
    for (const auto& t : c.a) check_index(t.index, num_vars);
  }
  for (const auto& c : quad_constraints) {
    for (const auto& t : c.q) check_index(t.index, num_vars);
    check_psd(c, num_vars);
  }
  for (const auto& c : log_rate_constraints) {
    for (const auto& t : c.linear) check_index(t.index, num_vars);
    for (const auto& t : c.logs) {
      check_index(t.index, num_vars);
      if (!(t.weight >= 0) || !(t.gain > 0)) throw PreconditionError("log-rate term needs weight >= 0 and gain > 0");
    }
  }
}

double max_constraint_value(const QcqpProblem& prob, const Eigen::VectorXd& z) {
  return max_row(lower_rows(prob), z);
}

QcqpResult solve_qcqp(const QcqpProblem& prob, const QcqpOptions& options) {
  prob.validate();
  const int n = prob.num_vars;
  const std::vector<Row> rows = lower_rows(prob);

  QcqpResult out;
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(n);
  if (options.start) {
    if (options.start->size() != n) throw DimensionError("start point has wrong length");
    z0 = *options.start;
  }

  if (!(max_row(rows, z0) < 0)) {
    out.used_phase1 = true;
    if (!std::isfinite(max_row(rows, z0))) z0.setZero();
    const double f0 = max_row(rows, z0);
    if (!std::isfinite(f0)) throw InfeasibleError("phase-1 start lies outside the log-rate domain");
    // min s s.t. f_i(z) <= s, s >= -1.
    std::vector<Row> aug = rows;
    for (auto& r : aug) {
      r.support.push_back(n);
      r.lin.push_back(-1.0);
    }
    Row floor_row;
    floor_row.support = {n};
    floor_row.lin = {-1.0};
    floor_row.constant = -1.0;
    aug.push_back(floor_row);
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + 1);
    c1[n] = -1.0;
    Eigen::VectorXd x1(n + 1);
    x1.head(n) = z0;
    x1[n] = std::max(f0, -1.0) + 1.0;
    QcqpOptions o1 = options;
    o1.tol = std::max(options.tol, 1e-10);
    const double target = -1e-6;
    const BarrierOutcome p1 = barrier(aug, c1, x1, o1, [&](const Eigen::VectorXd& x) {
      return x[n] < target && max_row(rows, x.head(n)) < 0;
    });
    z0 = p1.z.head(n);
    if (!(max_row(rows, z0) < 0)) {
      throw InfeasibleError(fmt::format("no strictly feasible point (phase-1 optimum {:.3g})", p1.z[n]));
    }
  }

  const BarrierOutcome c0 = barrier(rows, prob.objective, z0, options, nullptr, true);
  const BarrierOutcome pd = primal_dual(rows, prob.objective, c0.z, c0.lambda, c0.iterations, options);
  out.z = pd.z;
  out.objective = prob.objective.dot(pd.z);
  out.duals = pd.lambda;
  out.iterations = pd.iterations;
  out.gap = pd.gap;
  out.dual_residual = pd.dual_residual;
  out.max_violation = std::max(0.0, max_row(rows, pd.z));
  out.converged = pd.converged;
  if (!out.converged && pd.gap > 1e-4 * std::max(1.0, std::abs(out.objective))) {
    throw NumericalFailure(fmt::format("interior point stalled with gap {:.3g}", pd.gap));
  }
  return out;
}

}  // namespace mobrelay
