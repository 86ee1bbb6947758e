#include "fedprice/horizontal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedprice/contract.hpp"
#include "fedprice/operator_pricing.hpp"
#include "fedprice/user_game.hpp"

namespace fedprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool within(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

OperatorResponse empty_response(const Scenario& scenario) {
  OperatorResponse r;
  r.prices = PriceSchedule::uniform(scenario.num_slots(), scenario.price_cap);
  r.demand = DemandDistribution::empty(scenario.num_slots());
  r.selected_types.assign(scenario.num_types(), false);
  r.max_cost = slot_equilibrium(scenario, r.prices, 0.0).cost;
  r.profit = operator_profit(scenario, r.prices, r.demand);
  return r;
}

}  // namespace

OperatorResponse operator_best_response(const Scenario& scenario, const Contract& contract) {
  scenario.validate();
  if (contract.items.size() != scenario.num_types()) {
    throw InputError("contract: expected one item per type");
  }
  const std::size_t J = scenario.num_types();
  std::vector<double> budget(J, -kInf);
  for (std::size_t j = 0; j < J; ++j) {
    const ContractItem& own = contract.items[j];
    if (!own.is_zero()) budget[j] = own.reward - scenario.types[j].theta * own.data;
  }
  std::vector<std::size_t> order(J);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return budget[a] > budget[b]; });

  OperatorResponse best = empty_response(scenario);
  const double max_budget = budget[order.front()];
  bool have_best = max_budget < best.max_cost;  // nobody joins at p0 everywhere

  std::vector<bool> selected(J, false);
  double users = 0.0;
  std::size_t end = 0;
  while (end < J && budget[order[end]] > -kInf) {
    // Types with equal budgets enter together.
    const double group_budget = budget[order[end]];
    while (end < J && budget[order[end]] > -kInf && within(budget[order[end]], group_budget, 1e-12)) {
      selected[order[end]] = true;
      users += scenario.types[order[end]].count;
      ++end;
    }
    const double next_budget = end < J ? budget[order[end]] : -kInf;
    const PricingPlan plan = best_plan(scenario, users, group_budget, next_budget, true);
    if (!plan.feasible) continue;
    if (!have_best || plan.profit >= best.profit - 1e-12 * std::max(1.0, std::fabs(plan.profit))) {
      best.prices = prices_for_cost(scenario, plan.demand, plan.common_cost);
      best.demand = plan.demand;
      best.selected_types = selected;
      best.max_cost = plan.common_cost;
      best.profit = plan.profit;
      have_best = true;
    }
  }
  if (!have_best) return empty_response(scenario);
  best.profit = operator_profit(scenario, best.prices, best.demand);
  return best;
}

HStatistic compute_H(const Scenario& scenario) {
  const SolveReport vertical = optimal_operator_solution(scenario);
  if (vertical.threshold == 0) {
    throw NumericalInfeasibility("vertical solution has no participation; H is undefined");
  }
  const std::vector<OperatorCandidate> cands = operator_candidates(scenario);
  const OperatorCandidate& cand = cands.at(vertical.threshold - 1);

  HStatistic h;
  h.threshold = vertical.threshold;
  h.server_tolerance = cand.server_upper;
  h.proviso_holds = cand.band.upper() <= cand.server_upper;
  h.operator_ceiling = cand.band.upper_selected;
  if (std::isfinite(cand.band.upper_unselected)) {
    h.operator_ceiling = std::max(h.operator_ceiling, cand.band.upper_unselected);
  }
  h.value = std::isinf(h.server_tolerance) ? h.server_tolerance : h.server_tolerance - h.operator_ceiling;
  return h;
}

HorizontalVerdict check_horizontal_equilibrium(const Scenario& scenario, int max_iterations) {
  HorizontalVerdict v;
  const SolveReport vertical = optimal_operator_solution(scenario);
  try {
    v.h = compute_H(scenario);
  } catch (const NumericalInfeasibility&) {
    v.h.value = -kInf;
    v.h.proviso_holds = false;
  }

  // No leader here, so the server breaks ties by its own rule (smaller x).
  const ContractSolution server_br = optimal_contract(scenario, vertical.common_cost);
  const OperatorResponse operator_br = operator_best_response(scenario, vertical.contract);
  v.server_gap = vertical.server_cost - server_br.server_cost;
  v.operator_gap = operator_br.profit - vertical.operator_profit;
  const bool server_ok =
      vertical.threshold > 0 && server_br.threshold == vertical.threshold &&
      v.server_gap <= kBestResponseGap * std::max(1.0, std::fabs(vertical.server_cost));
  const bool operator_ok =
      v.operator_gap <= kBestResponseGap * std::max(1.0, std::fabs(vertical.operator_profit));
  v.mutual_best_response = server_ok && operator_ok;
  v.exists = v.h.value >= 0.0 && v.mutual_best_response;

  if (v.exists) {
    SolveReport r;
    r.prices = operator_br.prices;
    r.demand = operator_br.demand;
    r.common_cost = operator_br.max_cost;
    const ContractSolution cs = optimal_contract(scenario, operator_br.max_cost, vertical.threshold);
    r.contract = cs.contract;
    r.threshold = cs.threshold;
    r.server_cost = cs.server_cost;
    r.operator_profit = operator_profit(scenario, r.prices, r.demand);
    fill_payoffs(scenario, r);
    v.report = std::move(r);
    return v;
  }

  // No equilibrium: alternate best responses for the record.
  Contract contract = vertical.contract;
  for (int k = 1; k <= max_iterations; ++k) {
    const OperatorResponse op = operator_best_response(scenario, contract);
    const ContractSolution cs = optimal_contract(scenario, op.max_cost);
    CycleStep step;
    step.iteration = k;
    step.server_threshold = cs.threshold;
    step.selected_users = static_cast<std::size_t>(std::lround(op.demand.total()));
    step.common_cost = op.max_cost;
    step.operator_profit = op.profit;
    step.server_cost = cs.server_cost;
    const bool repeat = std::any_of(v.iterations.begin(), v.iterations.end(), [&](const CycleStep& s) {
      return s.server_threshold == step.server_threshold && s.selected_users == step.selected_users &&
             within(s.common_cost, step.common_cost, 1e-12);
    });
    v.iterations.push_back(step);
    if (repeat) {
      v.cycle_detected = true;
      break;
    }
    contract = cs.contract;
  }
  return v;
}

}  // namespace fedprice
