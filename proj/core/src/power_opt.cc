#include "mobrelay/power_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mobrelay/convex/ellipsoid.hpp"
#include "mobrelay/convex/interior_point.hpp"
#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

WaterfillResult fill_or_zero(std::span<const double> gains, std::span<const double> weights, double budget) {
  const bool any = std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0; });
  if (!any || budget == 0.0) {
    WaterfillResult r;
    r.powers.assign(gains.size(), 0.0);
    return r;
  }
  return weighted_wf(gains, weights, budget);
}

double weighted_rate(std::span<const double> gains, std::span<const double> weights, const std::vector<double>& p) {
  double v = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (weights[i] > 0) v += weights[i] * std::log2(1.0 + p[i] * gains[i]);
  }
  return v;
}

// Source powers over slots 1..N-1 padded to N entries.
std::vector<double> pad_source(const std::vector<double>& p) {
  std::vector<double> out(p);
  out.push_back(0.0);
  return out;
}

// Relay powers over slots 2..N padded to N entries.
std::vector<double> pad_relay(const std::vector<double>& p) {
  std::vector<double> out;
  out.reserve(p.size() + 1);
  out.push_back(0.0);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<double> levels_from_powers(std::span<const double> p, std::span<const double> gains) {
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) out[i] = p[i] + 1.0 / gains[i];
  }
  return out;
}

std::vector<double> rates_of(const std::vector<double>& p, std::span<const double> gains) {
  std::vector<double> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = std::log2(1.0 + std::max(0.0, p[i]) * gains[i]);
  return r;
}

// Causal forwarding of the given relay rates followed by power trimming.
PowerSchedule finalize(std::vector<double> p_s, const std::vector<double>& relay_caps, const ChannelProfile& ch) {
  for (double& p : p_s) p = std::max(0.0, p);
  p_s.back() = 0.0;
  const std::vector<double> r_s = rates_of(p_s, ch.gamma_sr);
  return schedule_from_rates(std::move(p_s), causal_forwarding(r_s, relay_caps), ch);
}

void check_channels(const ChannelProfile& ch) {
  if (ch.gamma_sr.size() != ch.gamma_rd.size()) throw DimensionError("channel sequences differ in length");
  if (ch.size() < 2) throw DimensionError("at least two slots are needed");
}

}  // namespace

std::string to_string(PowerCase c) {
  switch (c) {
    case PowerCase::Case1:
      return "case1";
    case PowerCase::Case2:
      return "case2";
    case PowerCase::Case3:
      return "case3";
    case PowerCase::MonotoneClosedForm:
      return "closed-form";
  }
  return "unknown";
}

DualState DualState::from_lambda(std::vector<double> lambda) {
  DualState d;
  for (double& l : lambda) {
    if (l < -1e-12 || !std::isfinite(l)) throw DomainError(fmt::format("multiplier {} is negative", l));
    l = std::max(0.0, l);
  }
  const std::size_t n = lambda.size();
  d.beta.assign(n, 0.0);
  d.nu.assign(n, 0.0);
  double suffix = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    suffix += lambda[k];
    d.beta[k] = suffix;
    d.nu[k] = 1.0 - suffix;
  }
  if (n > 0 && d.nu[0] < -1e-12) {
    throw DomainError(fmt::format("multipliers sum to {} > 1: dual function is unbounded", d.beta[0]));
  }
  for (double& v : d.nu) v = std::max(0.0, v);
  d.lambda = std::move(lambda);
  return d;
}

DualEvaluation dual_value_and_subgradient(const DualState& dual, const ChannelProfile& channels, Budgets budgets) {
  check_channels(channels);
  const std::size_t n = channels.size();
  if (dual.size() != n - 1 || dual.beta.size() != n - 1 || dual.nu.size() != n - 1) {
    throw DimensionError("dual state does not match the slot count");
  }
  for (double v : dual.nu) {
    if (v < 0) throw DomainError("negative relay weight: dual function is unbounded");
  }
  const auto gs = channels.source_gains();
  const auto gr = channels.relay_gains();

  DualEvaluation ev;
  ev.source = fill_or_zero(gs, dual.beta, budgets.source);
  ev.relay = fill_or_zero(gr, dual.nu, budgets.relay);
  ev.value = weighted_rate(gs, dual.beta, ev.source.powers) + weighted_rate(gr, dual.nu, ev.relay.powers);

  const std::vector<double> p_s = pad_source(ev.source.powers);
  const std::vector<double> r_s = rates_of(p_s, channels.gamma_sr);
  const std::vector<double> caps = pad_relay(rates_of(ev.relay.powers, gr));

  ev.subgradient.resize(static_cast<Eigen::Index>(n - 1));
  double sent = 0.0;
  double forwarded = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    sent += r_s[k];
    forwarded += caps[k + 1];
    ev.subgradient[static_cast<Eigen::Index>(k)] = sent - forwarded;
  }
  ev.candidate = finalize(p_s, caps, channels);
  ev.candidate_objective = throughput(ev.candidate);
  return ev;
}

DualSolveResult solve_dual(const ChannelProfile& channels, Budgets budgets, const DualSolveOptions& options) {
  check_channels(channels);
  const std::size_t n = channels.size();
  const Eigen::Index d = static_cast<Eigen::Index>(n - 1);

  DualSolveResult out;
  out.best_candidate_objective = -1.0;
  EllipsoidOracle oracle = [&](const Eigen::VectorXd& x) {
    if (auto c = capped_simplex_cut(x)) return *c;
    const DualState st = DualState::from_lambda(std::vector<double>(x.data(), x.data() + x.size()));
    DualEvaluation ev = dual_value_and_subgradient(st, channels, budgets);
    if (ev.candidate_objective > out.best_candidate_objective) {
      out.best_candidate_objective = ev.candidate_objective;
      out.best_candidate = std::move(ev.candidate);
    }
    EllipsoidCut c;
    c.kind = EllipsoidCut::Kind::Objective;
    c.value = ev.value;
    c.subgradient = std::move(ev.subgradient);
    c.lower_bound = out.best_candidate_objective;
    return c;
  };

  EllipsoidOptions eo;
  const long nn = static_cast<long>(n);
  eo.max_iters = options.max_iters > 0 ? options.max_iters : 500 * nn * nn;
  eo.tol = options.tol;
  const Eigen::VectorXd center = Eigen::VectorXd::Constant(d, 1.0 / (2.0 * static_cast<double>(d)));
  const EllipsoidResult er = ellipsoid_minimize(oracle, center, std::sqrt(static_cast<double>(n)), eo);

  std::vector<double> lambda(er.best_point.data(), er.best_point.data() + d);
  for (double& l : lambda) l = std::max(0.0, l);
  const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  if (total > 1.0) {
    for (double& l : lambda) l /= total;
  }
  out.dual = DualState::from_lambda(std::move(lambda));
  out.value = er.best_value;
  out.lower_bound = er.lower_bound;
  out.iterations = er.iterations;
  out.converged = er.converged;
  return out;
}

RelayRates relay_schedule_given_source(std::span<const double> r_s, std::span<const double> gamma_rd,
                                       double relay_budget) {
  const std::size_t n = r_s.size();
  if (gamma_rd.size() != n) throw DimensionError("source rates and relay gains differ in length");
  if (relay_budget < 0) throw DomainError("relay budget must be non-negative");
  RelayRates out;
  out.p_r.assign(n, 0.0);
  out.r_r.assign(n, 0.0);
  if (n < 2 || relay_budget == 0.0) return out;

  // arrived[j]: data available to the relay by the end of slot j (0-based).
  std::vector<double> arrived(n, 0.0);
  double acc = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    if (r_s[j - 1] < 0) throw DomainError("source rates must be non-negative");
    acc += r_s[j - 1];
    arrived[j] = acc;
  }
  const double tiny = 1e-14 * std::max(1.0, acc);
  std::size_t first = 1;
  while (first < n && arrived[first] <= tiny) ++first;
  if (first == n) return out;

  const int m = static_cast<int>(n - first);
  QcqpProblem prob;
  prob.num_vars = 2 * m;
  prob.objective = Eigen::VectorXd::Zero(2 * m);
  prob.objective.tail(m).setOnes();
  prob.lower = Eigen::VectorXd::Zero(2 * m);
  prob.upper = Eigen::VectorXd::Constant(2 * m, std::numeric_limits<double>::infinity());

  const double u0 = 0.5 / m;
  double cap0 = std::numeric_limits<double>::infinity();
  LinearConstraint budget;
  for (int k = 0; k < m; ++k) {
    const double g = gamma_rd[first + k] * relay_budget;
    prob.log_rate_constraints.push_back({{{m + k, 1.0}}, {{k, g, 1.0}}, 0.0});
    cap0 = std::min(cap0, std::log2(1.0 + g * u0));
    budget.a.push_back({k, 1.0});
  }
  budget.b = 1.0;
  prob.linear_constraints.push_back(budget);
  for (int k = 0; k < m; ++k) {
    LinearConstraint c;
    for (int i = 0; i <= k; ++i) c.a.push_back({m + i, 1.0});
    c.b = arrived[first + k];
    prob.linear_constraints.push_back(c);
  }
  Eigen::VectorXd start(2 * m);
  start.head(m).setConstant(u0);
  start.tail(m).setConstant(std::min(0.25 * arrived[first] / m, 0.5 * cap0));

  QcqpOptions opt;
  opt.tol = 1e-11;
  opt.start = start;
  const QcqpResult res = solve_qcqp(prob, opt);

  std::vector<double> caps(n, 0.0);
  for (int k = 0; k < m; ++k) caps[first + k] = std::max(0.0, res.z[m + k]);
  out.r_r = causal_forwarding(r_s, caps);
  for (std::size_t j = 1; j < n; ++j) out.p_r[j] = std::expm1(out.r_r[j] * std::log(2.0)) / gamma_rd[j];
  const double used = std::accumulate(out.p_r.begin(), out.p_r.end(), 0.0);
  if (used > relay_budget) {
    // Interior-point residue; scale back onto the budget.
    for (std::size_t j = 1; j < n; ++j) {
      out.p_r[j] *= relay_budget / used;
      out.r_r[j] = std::log2(1.0 + out.p_r[j] * gamma_rd[j]);
    }
  }
  return out;
}

std::vector<double> min_power_source_schedule(std::span<const double> r_r, std::span<const double> gamma_sr,
                                              double source_budget) {
  const std::size_t n = r_r.size();
  if (gamma_sr.size() != n) throw DimensionError("relay rates and source gains differ in length");
  std::vector<double> p(n, 0.0);
  if (n < 2) return p;
  double demand = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    if (r_r[j] < 0) throw DomainError("relay rates must be non-negative");
    demand += r_r[j];
  }
  if (demand == 0.0) return p;

  const int m = static_cast<int>(n - 1);
  const double margin = 0.01 * std::max(demand / m, 1e-6);
  std::vector<double> p0(m);
  for (int i = 0; i < m; ++i) p0[i] = std::expm1((r_r[i + 1] + margin) * std::log(2.0)) / gamma_sr[i];
  const double scale = std::accumulate(p0.begin(), p0.end(), 0.0);

  QcqpProblem prob;
  prob.num_vars = m;
  prob.objective = Eigen::VectorXd::Constant(m, -1.0);
  prob.lower = Eigen::VectorXd::Zero(m);
  prob.upper = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  double cumulative = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    cumulative += r_r[j];
    if (r_r[j] <= 0) continue;
    LogRateConstraint c;
    for (std::size_t i = 0; i < j; ++i) c.logs.push_back({static_cast<int>(i), gamma_sr[i] * scale, 1.0});
    c.rhs = -cumulative;
    prob.log_rate_constraints.push_back(std::move(c));
  }
  Eigen::VectorXd start(m);
  for (int i = 0; i < m; ++i) start[i] = p0[i] / scale;
  QcqpOptions opt;
  opt.tol = 1e-12;
  opt.start = start;
  const QcqpResult res = solve_qcqp(prob, opt);

  for (int i = 0; i < m; ++i) p[i] = std::max(0.0, res.z[i]) * scale;
  const double used = std::accumulate(p.begin(), p.end(), 0.0);
  if (used > source_budget * (1.0 + 1e-9) + 1e-300) {
    throw CaseInconsistencyError(
        fmt::format("relay rates need source energy {:.9g} but only {:.9g} is available", used, source_budget));
  }
  if (used > source_budget) {
    for (double& v : p) v *= source_budget / used;
  }
  return p;
}

PowerSolution recover_primal(const DualState& dual, const ChannelProfile& channels, Budgets budgets) {
  check_channels(channels);
  const std::size_t n = channels.size();
  if (dual.size() != n - 1) throw DimensionError("dual state does not match the slot count");
  const auto gs = channels.source_gains();
  const auto gr = channels.relay_gains();
  const double beta1 = dual.beta.front();
  const double nuN = dual.nu.back();
  const bool case2 = nuN <= kCaseEpsilon;
  const bool case3 = beta1 <= kCaseEpsilon;
  if (case2 && case3) {
    throw CaseInconsistencyError(fmt::format("beta_1 = {:.3g} and nu_N = {:.3g} both vanish", beta1, nuN));
  }

  PowerSolution sol;
  sol.dual = dual;
  if (!case2 && !case3) {
    sol.case_tag = PowerCase::Case1;
    const WaterfillResult src = fill_or_zero(gs, dual.beta, budgets.source);
    const WaterfillResult rel = fill_or_zero(gr, dual.nu, budgets.relay);
    sol.schedule = finalize(pad_source(src.powers), pad_relay(rates_of(rel.powers, gr)), channels);
    sol.source_levels.resize(n - 1);
    sol.relay_levels.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      sol.source_levels[k] = src.water_level * dual.beta[k];
      sol.relay_levels[k] = rel.water_level * dual.nu[k];
    }
  } else if (case2) {
    sol.case_tag = PowerCase::Case2;
    const WaterfillResult src = classic_wf(gs, budgets.source);
    const std::vector<double> p_s = pad_source(src.powers);
    const RelayRates rel = relay_schedule_given_source(rates_of(p_s, channels.gamma_sr), channels.gamma_rd,
                                                       budgets.relay);
    sol.schedule = finalize(p_s, rel.r_r, channels);
    sol.source_levels.assign(n - 1, src.water_level);
    sol.relay_levels = levels_from_powers(std::span<const double>(sol.schedule.p_r).subspan(1), gr);
  } else {
    sol.case_tag = PowerCase::Case3;
    const WaterfillResult rel = classic_wf(gr, budgets.relay);
    const std::vector<double> caps = pad_relay(rates_of(rel.powers, gr));
    std::vector<double> p_s = min_power_source_schedule(caps, channels.gamma_sr, budgets.source);
    sol.schedule = finalize(std::move(p_s), caps, channels);
    sol.source_levels = levels_from_powers(std::span<const double>(sol.schedule.p_s).first(n - 1), gs);
    sol.relay_levels.assign(n - 1, rel.water_level);
  }
  sol.objective = throughput(sol.schedule);
  return sol;
}

bool has_monotone_channels(const ChannelProfile& channels, double tol) {
  check_channels(channels);
  const auto gs = channels.source_gains();
  const auto gr = channels.relay_gains();
  for (std::size_t i = 0; i + 1 < gs.size(); ++i) {
    if (gs[i + 1] > gs[i] + tol * std::max(gs[i], gs[i + 1])) return false;
  }
  for (std::size_t i = 0; i + 1 < gr.size(); ++i) {
    if (gr[i + 1] < gr[i] - tol * std::max(gr[i], gr[i + 1])) return false;
  }
  return true;
}

PowerSolution solve_monotone(const ChannelProfile& channels, Budgets budgets) {
  if (!has_monotone_channels(channels)) {
    throw PreconditionError("closed-form allocation needs non-increasing source and non-decreasing relay gains");
  }
  const std::size_t n = channels.size();
  const auto gs = channels.source_gains();
  const auto gr = channels.relay_gains();
  const double cap_s = cwf_rate(gs, budgets.source);
  const double cap_r = cwf_rate(gr, budgets.relay);

  WaterfillResult src;
  WaterfillResult rel;
  std::vector<double> lambda(n - 1, 0.0);
  if (cap_s <= cap_r) {
    src = classic_wf(gs, budgets.source);
    rel = classic_wf(gr, std::min(budgets.relay, inverse_cwf(gr, cap_s)));
    lambda.back() = 1.0;
  } else {
    rel = classic_wf(gr, budgets.relay);
    src = classic_wf(gs, std::min(budgets.source, inverse_cwf(gs, cap_r)));
  }

  PowerSolution sol;
  sol.case_tag = PowerCase::MonotoneClosedForm;
  sol.dual = DualState::from_lambda(std::move(lambda));
  sol.schedule = make_schedule(pad_source(src.powers), pad_relay(rel.powers), channels);
  sol.objective = std::min(cap_s, cap_r);
  sol.dual_bound = sol.objective;
  sol.source_levels.assign(n - 1, src.water_level);
  sol.relay_levels.assign(n - 1, rel.water_level);
  return sol;
}

PowerSolution optimal_power(const ChannelProfile& channels, Budgets budgets, const DualSolveOptions& options) {
  if (has_monotone_channels(channels)) return solve_monotone(channels, budgets);

  const DualSolveResult dual = solve_dual(channels, budgets, options);
  PowerSolution sol;
  bool recovered = true;
  try {
    sol = recover_primal(dual.dual, channels, budgets);
  } catch (const CaseInconsistencyError&) {
    recovered = false;
  } catch (const NumericalFailure&) {
    recovered = false;
  } catch (const InfeasibleError&) {
    recovered = false;
  }
  if (!recovered) {
    sol.dual = dual.dual;
    sol.case_tag = dual.dual.nu.back() <= kCaseEpsilon ? PowerCase::Case2 : PowerCase::Case3;
  }
  if (!recovered || dual.best_candidate_objective > sol.objective) {
    sol.schedule = dual.best_candidate;
    sol.objective = dual.best_candidate_objective;
    if (!recovered || sol.source_levels.empty()) {
      const auto s = std::span<const double>(sol.schedule.p_s).first(channels.size() - 1);
      const auto r = std::span<const double>(sol.schedule.p_r).subspan(1);
      sol.source_levels = levels_from_powers(s, channels.source_gains());
      sol.relay_levels = levels_from_powers(r, channels.relay_gains());
    }
  }
  sol.dual_iterations = dual.iterations;
  sol.dual_converged = dual.converged;
  sol.dual_bound = dual.value;
  return sol;
}

PowerSolution optimal_power(const Trajectory& traj, const ScenarioConfig& cfg) {
  return optimal_power(channel_profile(traj, cfg), Budgets::from(cfg));
}

}  // namespace mobrelay
