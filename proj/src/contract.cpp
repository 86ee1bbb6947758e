#include "fedprice/contract.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedprice/user_game.hpp"

namespace fedprice {

namespace {

// Stationary point of W_S in the shared data size of types [a, x) when types
// [0, a) hold d_max. W_S is convex in it, so clamping gives the minimizer.
double pooled_stationary_point(const Scenario& s, std::size_t a, std::size_t x) {
  const double below = s.users_up_to(a);
  const double upto = s.users_up_to(x);
  const double pooled = upto - below;
  const double theta_top = s.types[x - 1].theta;
  const double theta_below = a > 0 ? s.types[a - 1].theta : 0.0;
  const double marginal = upto * theta_top - below * theta_below;
  const double volume = std::pow(pooled / (2.0 * s.reward_weight * marginal), 2.0 / 3.0);
  return (volume - below * s.d_max) / pooled;
}

double design_cost(const Scenario& s, const ThresholdDesign& design, double c) {
  return server_cost(s, contract_for_design(s, design, c));
}

bool cost_less(double a, double b) {
  return a < b - kCostTieTolerance * std::max(1.0, std::fabs(b));
}

}  // namespace

std::vector<double> optimal_rewards(const Scenario& scenario, std::span<const double> data,
                                    std::span<const std::size_t> incentivized, double c) {
  const std::size_t J = scenario.num_types();
  if (data.size() != J) throw InputError("data: expected one entry per type");
  if (!(c >= 0.0)) throw InputError("network cost must be nonnegative");
  for (std::size_t k = 0; k < incentivized.size(); ++k) {
    if (incentivized[k] >= J) throw InputError("incentivized type index out of range");
    if (k > 0 && incentivized[k] <= incentivized[k - 1]) {
      throw InputError("incentivized types must be strictly ascending");
    }
  }
  for (double d : data) {
    if (!(d >= 0.0 && d <= scenario.d_max)) throw InputError("data sizes must lie in [0, d_max]");
  }

  std::vector<double> rewards(J, 0.0);
  double rent = 0.0;
  for (std::size_t k = incentivized.size(); k-- > 0;) {
    const std::size_t j = incentivized[k];
    rewards[j] = scenario.types[j].theta * data[j] + rent + c;
    if (k > 0) {
      rent += (scenario.types[j].theta - scenario.types[incentivized[k - 1]].theta) * data[j];
    }
  }
  return rewards;
}

ThresholdCost server_cost_at_threshold(const Scenario& scenario, std::size_t x, double c) {
  if (x < 1 || x > scenario.num_types()) throw InputError("threshold out of range");
  ThresholdCost out;
  const double stationary = pooled_stationary_point(scenario, x - 1, x);
  if (!(stationary > 0.0)) return out;

  ThresholdDesign interior{x, x - 1, std::min(stationary, scenario.d_max), 0.0, true};
  ThresholdDesign boundary{x, x - 1, scenario.d_max, 0.0, true};
  const double ci = design_cost(scenario, interior, c);
  const double cb = design_cost(scenario, boundary, c);
  out.feasible = true;
  if (cb < ci) {
    out.cost = cb;
    out.threshold_data = scenario.d_max;
  } else {
    out.cost = ci;
    out.threshold_data = interior.pooled_data;
  }
  return out;
}

std::vector<double> ThresholdDesign::data(const Scenario& scenario) const {
  std::vector<double> d(scenario.num_types(), 0.0);
  for (std::size_t j = 0; j < threshold; ++j) d[j] = j < pool_start ? scenario.d_max : pooled_data;
  return d;
}

Contract contract_for_design(const Scenario& scenario, const ThresholdDesign& design, double c) {
  Contract contract = Contract::zeros(scenario.num_types());
  if (!design.feasible || design.threshold == 0) return contract;
  const std::vector<double> data = design.data(scenario);
  std::vector<std::size_t> incentivized(design.threshold);
  std::iota(incentivized.begin(), incentivized.end(), std::size_t{0});
  const std::vector<double> rewards = optimal_rewards(scenario, data, incentivized, c);
  for (std::size_t j = 0; j < design.threshold; ++j) contract.items[j] = {data[j], rewards[j]};
  return contract;
}

ThresholdDesign best_threshold_design(const Scenario& scenario, std::size_t x) {
  if (x < 1 || x > scenario.num_types()) throw InputError("threshold out of range");
  ThresholdDesign best{x, x - 1, 0.0, kInfiniteCost, false};
  // Unpooled candidate first so it wins ties.
  for (std::size_t a = x; a-- > 0;) {
    const double stationary = pooled_stationary_point(scenario, a, x);
    if (!(stationary > 0.0)) continue;
    ThresholdDesign d{x, a, std::min(stationary, scenario.d_max), 0.0, true};
    d.cost_at_zero = design_cost(scenario, d, 0.0);
    if (!best.feasible || cost_less(d.cost_at_zero, best.cost_at_zero)) best = d;
  }
  return best;
}

ServerCostLines ServerCostLines::build(const Scenario& scenario) {
  ServerCostLines lines;
  for (std::size_t x = 1; x <= scenario.num_types(); ++x) {
    lines.designs.push_back(best_threshold_design(scenario, x));
    lines.slopes.push_back(scenario.reward_weight * scenario.users_up_to(x));
  }
  return lines;
}

double ServerCostLines::cost(std::size_t x, double c) const {
  const ThresholdDesign& d = designs.at(x - 1);
  if (!d.feasible) return kInfiniteCost;
  return d.cost_at_zero + slopes[x - 1] * c;
}

double ServerCostLines::upper_preference(std::size_t x) const {
  if (!feasible(x)) return -std::numeric_limits<double>::infinity();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < x; ++j) {
    if (!feasible(j)) continue;
    bound = std::min(bound, (designs[j - 1].cost_at_zero - designs[x - 1].cost_at_zero) /
                                (slopes[x - 1] - slopes[j - 1]));
  }
  return bound;
}

double ServerCostLines::lower_preference(std::size_t x) const {
  double bound = -std::numeric_limits<double>::infinity();
  if (!feasible(x)) return std::numeric_limits<double>::infinity();
  for (std::size_t j = x + 1; j <= designs.size(); ++j) {
    if (!feasible(j)) continue;
    bound = std::max(bound, (designs[x - 1].cost_at_zero - designs[j - 1].cost_at_zero) /
                                (slopes[j - 1] - slopes[x - 1]));
  }
  return bound;
}

ContractSolution optimal_contract(const Scenario& scenario, double c,
                                  std::optional<std::size_t> preferred) {
  const ServerCostLines lines = ServerCostLines::build(scenario);
  ContractSolution out;
  out.common_cost = c;
  out.contract = Contract::zeros(scenario.num_types());

  double best = kInfiniteCost;
  for (std::size_t x = 1; x <= scenario.num_types(); ++x) best = std::min(best, lines.cost(x, c));
  if (best == kInfiniteCost) return out;

  std::size_t chosen = 0;
  for (std::size_t x = 1; x <= scenario.num_types(); ++x) {
    if (cost_less(best, lines.cost(x, c))) continue;
    if (chosen == 0) chosen = x;
    if (preferred && *preferred == x) chosen = x;
  }
  const ThresholdDesign& design = lines.designs[chosen - 1];
  out.contract = contract_for_design(scenario, design, c);
  out.threshold = chosen;
  out.pool_start = design.pool_start;
  out.server_cost = server_cost(scenario, out.contract);
  return out;
}

ContractSolution optimal_contract(const Scenario& scenario, const PriceSchedule& prices,
                                  const DemandDistribution& demand) {
  return optimal_contract(scenario, common_network_cost(scenario, prices, demand));
}

}  // namespace fedprice
