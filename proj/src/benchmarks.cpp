#include "fedprice/benchmarks.hpp"

#include <cmath>
#include <exception>
#include <functional>

#include "fedprice/contract.hpp"
#include "fedprice/horizontal.hpp"
#include "fedprice/operator_pricing.hpp"
#include "fedprice/response.hpp"
#include "fedprice/user_game.hpp"

namespace fedprice {

SolveReport solve_njo(const Scenario& scenario) {
  scenario.validate();
  const ContractSolution cs = optimal_contract(scenario, 0.0);
  const OperatorResponse op = operator_best_response(scenario, cs.contract);

  // Users re-check participation at the cost the operator actually imposes.
  const std::vector<ItemChoice> picks = contract_item_choice(scenario, cs.contract, op.max_cost);
  SolveReport r;
  r.contract = cs.contract;
  r.prices = op.prices;
  r.choices.assign(scenario.num_types(), std::nullopt);
  r.user_payoffs.assign(scenario.num_types(), 0.0);
  double users = 0.0;
  for (std::size_t j = 0; j < picks.size(); ++j) {
    if (!picks[j].item) continue;
    r.choices[j] = picks[j].item;
    users += scenario.types[j].count;
    r.threshold = j + 1;
  }
  if (std::fabs(users - op.demand.total()) <= 1e-9 * std::max(1.0, users)) {
    r.demand = op.demand;
    r.common_cost = op.max_cost;
  } else {
    const SlotEquilibrium eq = slot_equilibrium(scenario, op.prices, users);
    r.demand = eq.demand;
    r.common_cost = eq.cost;
  }
  for (std::size_t j = 0; j < picks.size(); ++j) {
    if (!r.choices[j]) continue;
    const ContractItem& it = r.contract.items[*r.choices[j]];
    r.user_payoffs[j] = it.reward - scenario.types[j].theta * it.data - r.common_cost;
  }
  r.server_cost = server_cost(scenario, r.contract, r.choices);
  r.operator_profit = operator_profit(scenario, r.prices, r.demand);
  return r;
}

SolveReport solve_ndp(const Scenario& scenario, int grid_points) {
  scenario.validate();
  if (grid_points < 2) throw InputError("grid_points must be at least 2");
  const ServerCostLines lines = ServerCostLines::build(scenario);
  const double p0 = scenario.price_cap;
  const std::size_t T = scenario.num_slots();
  auto profit = [&](double p) {
    return downstream_response(scenario, PriceSchedule::uniform(T, p), lines).operator_profit;
  };

  int best_k = 0;
  double best_value = profit(0.0);
  for (int k = 1; k < grid_points; ++k) {
    const double v = profit(p0 * k / (grid_points - 1));
    if (v >= best_value) {
      best_value = v;
      best_k = k;
    }
  }
  double best_p = p0 * best_k / (grid_points - 1);

  double a = p0 * std::max(0, best_k - 1) / (grid_points - 1);
  double b = p0 * std::min(grid_points - 1, best_k + 1) / (grid_points - 1);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = profit(x1);
  double f2 = profit(x2);
  while (b - a > 1e-6 * p0) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = profit(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = profit(x1);
    }
  }
  for (double p : {x1, x2}) {
    const double v = profit(p);
    if (v > best_value) {
      best_value = v;
      best_p = p;
    }
  }
  return downstream_response(scenario, PriceSchedule::uniform(T, best_p), lines);
}

double percent_change(double value, double reference) {
  if (value == reference) return 0.0;
  if (std::isinf(reference)) return reference > 0.0 ? -100.0 : 100.0;
  if (reference == 0.0) return value > 0.0 ? kInfiniteCost : -kInfiniteCost;
  return 100.0 * (value - reference) / std::fabs(reference);
}

Comparison compare_mechanisms(const Scenario& scenario, const std::string& provenance) {
  Comparison out;
  out.provenance = provenance;
  const std::vector<std::pair<std::string, std::function<SolveReport()>>> runs = {
      {"IJD", [&] { return optimal_operator_solution(scenario); }},
      {"NJO", [&] { return solve_njo(scenario); }},
      {"NDP", [&] { return solve_ndp(scenario); }},
  };
  for (const auto& [name, run] : runs) {
    MechanismOutcome m;
    m.name = name;
    try {
      m.report = run();
    } catch (const std::exception& e) {
      m.error = e.what();
    }
    out.mechanisms.push_back(std::move(m));
  }
  return out;
}

}  // namespace fedprice
