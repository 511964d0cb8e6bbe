#include "mobrelay/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

void check_gains(std::span<const double> gains) {
  if (gains.empty()) throw DimensionError("water-filling needs at least one gain");
  for (double g : gains) {
    if (!(g > 0) || !std::isfinite(g)) throw DomainError(fmt::format("gain {} is not positive and finite", g));
  }
}

double aggregate(std::span<const double> gains, const std::vector<double>& powers) {
  double r = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) r += std::log2(1.0 + powers[i] * gains[i]);
  return r;
}

}  // namespace

WaterfillResult weighted_wf(std::span<const double> gains, std::span<const double> weights, double budget) {
  check_gains(gains);
  if (weights.size() != gains.size()) throw DimensionError("weights and gains differ in length");
  if (!(budget >= 0) || !std::isfinite(budget)) throw DomainError(fmt::format("budget {} must be >= 0", budget));
  WaterfillResult out;
  out.powers.assign(gains.size(), 0.0);
  if (budget == 0.0) return out;

  // Slot n switches on once level * w[n] exceeds 1/g[n], i.e. at level 1/(g w).
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (weights[i] < 0 || !std::isfinite(weights[i])) throw DomainError("weights must be non-negative");
    if (weights[i] > 0) order.push_back(i);
  }
  if (order.empty()) throw DomainError("all weights are zero: water level is unbounded");
  auto threshold = [&](std::size_t i) { return 1.0 / (gains[i] * weights[i]); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return threshold(a) < threshold(b); });

  double w_sum = 0.0;
  double inv_sum = 0.0;
  double level = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    w_sum += weights[order[k]];
    inv_sum += 1.0 / gains[order[k]];
    level = (budget + inv_sum) / w_sum;
    if (k + 1 == order.size() || level <= threshold(order[k + 1])) break;
  }
  out.water_level = level;
  for (std::size_t i : order) out.powers[i] = std::max(0.0, level * weights[i] - 1.0 / gains[i]);
  out.aggregate_rate = aggregate(gains, out.powers);
  return out;
}

WaterfillResult classic_wf(std::span<const double> gains, double budget) {
  check_gains(gains);
  std::vector<double> ones(gains.size(), 1.0);
  return weighted_wf(gains, ones, budget);
}

double cwf_rate(std::span<const double> gains, double budget) { return classic_wf(gains, budget).aggregate_rate; }

double inverse_cwf(std::span<const double> gains, double target_rate) {
  check_gains(gains);
  if (!(target_rate >= 0) || std::isnan(target_rate)) {
    throw DomainError(fmt::format("target rate {} must be >= 0", target_rate));
  }
  if (target_rate == 0.0) return 0.0;
  if (!std::isfinite(target_rate)) return target_rate;
  std::vector<double> g(gains.begin(), gains.end());
  std::sort(g.begin(), g.end(), std::greater<>());
  // With the k strongest slots active at level L: rate = k log2 L + sum log2 g.
  double log_sum = 0.0;
  double inv_sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    log_sum += std::log2(g[k]);
    inv_sum += 1.0 / g[k];
    const double kk = static_cast<double>(k + 1);
    const double level = std::exp2((target_rate - log_sum) / kk);
    if (k + 1 == g.size() || level <= 1.0 / g[k + 1]) return std::max(0.0, kk * level - inv_sum);
  }
  return 0.0;
}

}  // namespace mobrelay
