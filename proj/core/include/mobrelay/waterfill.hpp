#pragma once

#include <span>
#include <vector>

namespace mobrelay {

struct WaterfillResult {
  std::vector<double> powers;
  double water_level = 0.0;
  double aggregate_rate = 0.0;  // sum of log2(1 + p * g), unweighted
};

// max sum log2(1 + p[n] g[n]) s.t. sum p = budget, p >= 0.
WaterfillResult classic_wf(std::span<const double> gains, double budget);

// p[n] = [level * w[n] - 1/g[n]]^+ with the level set by the budget.
// Maximises sum w[n] log2(1 + p[n] g[n]).
WaterfillResult weighted_wf(std::span<const double> gains, std::span<const double> weights, double budget);

double cwf_rate(std::span<const double> gains, double budget);

// Smallest budget whose classic water-filling rate equals target_rate.
double inverse_cwf(std::span<const double> gains, double target_rate);

}  // namespace mobrelay
