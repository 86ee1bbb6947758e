#include "fedprice/response.hpp"

#include <cmath>

#include "fedprice/operator_pricing.hpp"
#include "fedprice/user_game.hpp"

namespace fedprice {

std::vector<DownstreamOption> downstream_options(const Scenario& scenario,
                                                 const PriceSchedule& prices,
                                                 const ServerCostLines& lines) {
  std::vector<DownstreamOption> out;
  for (std::size_t x = 1; x <= scenario.num_types(); ++x) {
    DownstreamOption opt;
    opt.threshold = x;
    if (!lines.feasible(x)) {
      out.push_back(opt);
      continue;
    }
    const SlotEquilibrium eq = slot_equilibrium(scenario, prices, scenario.users_up_to(x));
    opt.common_cost = eq.cost;
    opt.server_cost = lines.cost(x, eq.cost);
    opt.operator_profit = operator_profit(scenario, prices, eq.demand);
    double best = kInfiniteCost;
    for (std::size_t j = 1; j <= scenario.num_types(); ++j) best = std::min(best, lines.cost(j, eq.cost));
    // Realized costs come from a bisection, so allow a relative slack.
    opt.consistent = opt.server_cost <= best + 1e-9 * std::fabs(best);
    out.push_back(opt);
  }
  return out;
}

SolveReport downstream_response(const Scenario& scenario, const PriceSchedule& prices) {
  return downstream_response(scenario, prices, ServerCostLines::build(scenario));
}

SolveReport downstream_response(const Scenario& scenario, const PriceSchedule& prices,
                                const ServerCostLines& lines) {
  const std::vector<DownstreamOption> options = downstream_options(scenario, prices, lines);
  const DownstreamOption* pick = nullptr;
  for (const DownstreamOption& o : options) {
    if (o.consistent && (!pick || o.operator_profit >= pick->operator_profit)) pick = &o;
  }
  if (!pick) {
    for (const DownstreamOption& o : options) {
      if (o.server_cost < kInfiniteCost && (!pick || o.server_cost < pick->server_cost)) pick = &o;
    }
  }

  SolveReport r;
  r.prices = prices;
  if (!pick) {
    r.contract = Contract::zeros(scenario.num_types());
    r.demand = DemandDistribution::empty(scenario.num_slots());
    r.common_cost = slot_equilibrium(scenario, prices, 0.0).cost;
    r.operator_profit = operator_profit(scenario, prices, r.demand);
    fill_payoffs(scenario, r);
    return r;
  }
  const SlotEquilibrium eq = slot_equilibrium(scenario, prices, scenario.users_up_to(pick->threshold));
  r.demand = eq.demand;
  r.common_cost = eq.cost;
  r.threshold = pick->threshold;
  r.contract = contract_for_design(scenario, lines.designs[pick->threshold - 1], eq.cost);
  r.server_cost = server_cost(scenario, r.contract);
  r.operator_profit = operator_profit(scenario, prices, r.demand);
  fill_payoffs(scenario, r);
  return r;
}

}  // namespace fedprice
