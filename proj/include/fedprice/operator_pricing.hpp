// Network operator's pricing problem under the vertical structure.
//
// The operator first fixes how many users participate and how they should be
// spread over slots (a convex KKT problem, or water-filling when users ignore
// congestion), then picks the largest common network cost the server will
// still accept, and posts prices that make every selected slot cost exactly
// that much.

#ifndef FEDPRICE_OPERATOR_PRICING_HPP
#define FEDPRICE_OPERATOR_PRICING_HPP

#include <optional>
#include <string>
#include <vector>

#include "fedprice/contract.hpp"
#include "fedprice/model.hpp"

namespace fedprice {

struct KktSolution {
  double lambda = 0.0;
  std::vector<std::size_t> selected;  // Q, ascending slot index
  DemandDistribution demand;
  double residual = 0.0;  // sum_t n_t - users
};

/// Slot ordering key h(t) (beta h(t) + 2 gamma): the operator's plus the
/// users' marginal cost of the first FL user in slot t.
double slot_key(const Scenario& scenario, std::size_t t);

/// Operator-optimal continuous demand for `users` participants (beta > 0).
/// Candidate slot sets are prefixes of the slot_key order (ties grouped); for
/// each, lambda is found by bisection and the prefix whose multiplier fits
/// between the last included and the first excluded key is returned.
/// Throws NumericalInfeasibility if no prefix qualifies.
KktSolution optimal_demand_distribution(const Scenario& scenario, double users);

struct WaterFillingSolution {
  DemandDistribution demand;
  double level = 0.0;  // v
  double price = 0.0;  // uniform price on the chosen slots
};

/// beta == 0: n_t = [v - h(t)]^+ with sum n_t = users. The chosen-slot price
/// is the largest cost the slot band admits (p0); the server's acceptance
/// limit is applied by optimal_operator_solution.
WaterFillingSolution water_filling(const Scenario& scenario, double users);

/// Continuous operator plan for `users` participants: KKT for beta > 0,
/// water-filling for beta == 0.
DemandDistribution planned_demand(const Scenario& scenario, double users);

/// Admissible common network costs for a planned demand, from the price cap:
/// every selected slot must be priceable in [0, p0], and no unselected slot may
/// undercut. `upper_unselected` is +inf when every slot is selected.
struct CostBand {
  double lower = 0.0;             // max over Q of beta (n + h)^2
  double upper_selected = 0.0;    // p0 + min over Q of beta (n + h)^2
  double upper_unselected = 0.0;  // p0 + min over Q-bar of beta h^2
  double upper() const;
};

CostBand cost_band(const Scenario& scenario, const DemandDistribution& demand);

/// Prices that give every selected slot network cost c; unselected slots get p0.
PriceSchedule prices_for_cost(const Scenario& scenario, const DemandDistribution& demand,
                              double c);

/// Operator profit when `demand` pays common cost c in the selected slots:
/// |X| c - beta sum_t n_t (n_t + h)^2 - gamma sum_t (n_t + h)^2.
double planned_profit(const Scenario& scenario, const DemandDistribution& demand, double c);

/// Cheapest split of `users` over slots subject to a floor on every slot's
/// total load (n_t + h(t) >= floor, all slots) and a ceiling on the total load
/// of used slots. Empty when the bounds leave no room.
std::optional<DemandDistribution> floor_split(const Scenario& scenario, double users, double floor,
                                              double ceiling);

/// A demand plan together with the common cost it is sold at.
struct PricingPlan {
  DemandDistribution demand;
  double common_cost = 0.0;
  double profit = 0.0;
  bool feasible = false;
  bool floor_raised = false;  // demand differs from planned_demand()
};

/// Best plan for `users` participants when the common cost may not exceed
/// `c_max` and must be at least `c_min` (strictly above it if `strict_min`).
/// The congestion-minimizing split is optimal when c_max binds. When the price
/// cap binds instead, the cap p0 + beta min_t (n_t + h(t))^2 rises with the
/// least-loaded slot, so loads are also searched over a common floor.
PricingPlan best_plan(const Scenario& scenario, double users, double c_max, double c_min,
                      bool strict_min = false);

/// One candidate threshold x_O of the vertical pricing problem.
struct OperatorCandidate {
  std::size_t threshold = 0;
  DemandDistribution demand;
  CostBand band;
  double server_upper = 0.0;  // largest c at which the server keeps x_O
  double server_lower = 0.0;  // smallest c at which the server keeps x_O
  double max_cost = 0.0;      // C~*(x_O)
  bool feasible = false;
  double profit = 0.0;
};

std::vector<OperatorCandidate> operator_candidates(const Scenario& scenario);

/// Vertical-structure equilibrium: operator prices, server contract, demand.
/// Candidates are thresholds 1..J; ties go to the larger threshold. When no
/// candidate is feasible the no-participation report (x* = 0, prices p0) is
/// returned.
SolveReport optimal_operator_solution(const Scenario& scenario);

/// Continuous demand rounded to integers by largest remainder, keeping the
/// total equal to `total`.
DemandDistribution round_largest_remainder(const DemandDistribution& demand, long total);

/// Fills payoffs and choices of `report` from its contract and common cost,
/// assuming each incentivized type takes its own item.
void fill_payoffs(const Scenario& scenario, SolveReport& report);

/// The no-participation outcome with all prices at p0.
SolveReport no_participation_report(const Scenario& scenario);

}  // namespace fedprice

#endif  // FEDPRICE_OPERATOR_PRICING_HPP
