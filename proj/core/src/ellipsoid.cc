#include "mobrelay/convex/ellipsoid.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

// Shrinks E to the minimum-volume ellipsoid containing
// E ∩ { y : g^T (y - c) <= -alpha sqrt(g^T P g) }.
void cut(EllipsoidState& st, const Eigen::VectorXd& g, double alpha) {
  const Eigen::Index d = st.center.size();
  const Eigen::VectorXd atg = st.factor.transpose() * g;
  const double norm = atg.norm();
  const Eigen::VectorXd gt = atg / norm;
  const Eigen::VectorXd step = st.factor * gt;
  if (d == 1) {
    st.center -= 0.5 * (1.0 + alpha) * step;
    st.factor *= 0.5 * (1.0 - alpha);
    st.log_volume += std::log(0.5 * (1.0 - alpha));
  } else {
    const double dd = static_cast<double>(d);
    st.center -= (1.0 + dd * alpha) / (dd + 1.0) * step;
    const double s = std::sqrt(dd * dd * (1.0 - alpha * alpha) / (dd * dd - 1.0));
    const double c = std::sqrt((dd - 1.0) * (1.0 - alpha) / ((dd + 1.0) * (1.0 + alpha))) - 1.0;
    st.factor.noalias() += c * step * gt.transpose();
    st.factor *= s;
    st.log_volume += dd * std::log(s) + std::log1p(c);
  }
  ++st.iteration;
  if (!st.center.allFinite() || !st.factor.allFinite()) {
    throw NumericalFailure(fmt::format("ellipsoid degenerated at iteration {}", st.iteration));
  }
}

}  // namespace

EllipsoidResult ellipsoid_minimize(const EllipsoidOracle& oracle, const Eigen::VectorXd& initial_center,
                                   double initial_radius, const EllipsoidOptions& options) {
  if (initial_center.size() == 0) throw DimensionError("ellipsoid needs a non-empty center");
  if (!(initial_radius > 0)) throw DomainError("ellipsoid radius must be positive");
  const Eigen::Index d = initial_center.size();

  EllipsoidState st;
  st.center = initial_center;
  st.factor = Eigen::MatrixXd::Identity(d, d) * initial_radius;
  st.log_volume = static_cast<double>(d) * std::log(initial_radius);

  EllipsoidResult out;
  out.best_value = std::numeric_limits<double>::infinity();
  out.lower_bound = -std::numeric_limits<double>::infinity();
  out.best_point = initial_center;

  auto gap_closed = [&] {
    return std::isfinite(out.best_value) &&
           out.best_value - out.lower_bound <= options.tol * std::max(1.0, std::abs(out.best_value));
  };

  for (long k = 0; k < options.max_iters; ++k) {
    EllipsoidCut c = oracle(st.center);
    if (c.subgradient.size() != d) throw DimensionError("oracle subgradient has wrong dimension");
    if (!std::isfinite(c.value) || !c.subgradient.allFinite()) {
      throw NumericalFailure(fmt::format("oracle returned non-finite data at iteration {}", k));
    }
    const double width = (st.factor.transpose() * c.subgradient).norm();
    double alpha = 0.0;
    if (c.kind == EllipsoidCut::Kind::Feasibility) {
      if (width == 0.0) throw NumericalFailure("feasibility cut with zero subgradient");
      alpha = c.value / width;
      if (alpha >= 1.0) throw NumericalFailure("ellipsoid no longer meets the feasible set");
    } else {
      if (c.lower_bound) out.lower_bound = std::max(out.lower_bound, *c.lower_bound);
      if (c.value < out.best_value) {
        out.best_value = c.value;
        out.best_point = st.center;
      }
      out.lower_bound = std::max(out.lower_bound, c.value - width);
      if (width == 0.0 || gap_closed()) {
        if (width == 0.0) out.lower_bound = std::max(out.lower_bound, out.best_value);
        out.converged = true;
        out.iterations = k;
        break;
      }
      alpha = (c.value - out.best_value) / width;
      if (alpha >= 1.0) {
        // No point of the ellipsoid can undercut the incumbent.
        out.lower_bound = std::max(out.lower_bound, out.best_value);
        out.converged = true;
        out.iterations = k;
        break;
      }
    }
    if (!options.deep_cuts) alpha = 0.0;
    cut(st, c.subgradient, alpha);
    out.iterations = k + 1;
    if (options.record_trace) out.trace.push_back({c.kind, c.value, st.log_volume});
  }
  if (!out.converged) {
    out.converged = gap_closed();
    out.hit_iteration_cap = !out.converged;
  }
  if (!std::isfinite(out.best_value)) throw NumericalFailure("ellipsoid never visited a feasible point");
  return out;
}

std::optional<EllipsoidCut> capped_simplex_cut(const Eigen::VectorXd& x, double cap) {
  Eigen::Index imin = 0;
  const double lo = x.minCoeff(&imin);
  const double over = x.sum() - cap;
  const double tol = 1e-15;
  if (-lo <= tol && over <= tol) return std::nullopt;
  EllipsoidCut c;
  c.kind = EllipsoidCut::Kind::Feasibility;
  if (-lo >= over) {
    c.value = -lo;
    c.subgradient = Eigen::VectorXd::Zero(x.size());
    c.subgradient[imin] = -1.0;
  } else {
    c.value = over;
    c.subgradient = Eigen::VectorXd::Ones(x.size());
  }
  return c;
}

}  // namespace mobrelay
