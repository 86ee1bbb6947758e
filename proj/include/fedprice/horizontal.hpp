// Horizontal structure: the operator and the server move simultaneously.

#ifndef FEDPRICE_HORIZONTAL_HPP
#define FEDPRICE_HORIZONTAL_HPP

#include <optional>
#include <vector>

#include "fedprice/model.hpp"

namespace fedprice {

struct OperatorResponse {
  PriceSchedule prices;
  DemandDistribution demand;
  std::vector<bool> selected_types;  // X_O, by type
  double max_cost = 0.0;             // C~*; network cost every participant pays
  double profit = 0.0;
};

/// Operator's best prices against a fixed contract. Each type's budget is the
/// surplus r_j - theta_j d_j of its own item (a zero item means no budget);
/// candidate user sets are the budget-ordered prefixes, and the common cost is
/// capped by the smallest budget inside the set and must exceed the largest
/// budget outside.
OperatorResponse operator_best_response(const Scenario& scenario, const Contract& contract);

struct HStatistic {
  double value = 0.0;
  double server_tolerance = 0.0;  // max c at which the server keeps x*
  double operator_ceiling = 0.0;  // larger of the two price-cap limits
  std::size_t threshold = 0;      // x*
  /// False when the vertical C~* is set by the server's preference rather than
  /// by the price cap; x* then falls back to the vertical threshold.
  bool proviso_holds = true;
};

/// H: server's tolerance for x* minus the operator's ceiling, both at the
/// vertical solution. A min over an empty slot set is left out of the ceiling.
HStatistic compute_H(const Scenario& scenario);

struct CycleStep {
  int iteration = 0;
  std::size_t server_threshold = 0;
  std::size_t selected_users = 0;
  double common_cost = 0.0;
  double operator_profit = 0.0;
  double server_cost = kInfiniteCost;
};

struct HorizontalVerdict {
  bool exists = false;
  HStatistic h;
  /// The vertical outcome is a fixed point of the two best responses. The
  /// server's response uses its own tie rule (smaller threshold), so a
  /// vertical cost sitting exactly on its indifference point is not a fixed
  /// point.
  bool mutual_best_response = false;
  double server_gap = 0.0;    // W_S(vertical) - W_S(server best response)
  double operator_gap = 0.0;  // W_O(operator best response) - W_O(vertical)
  std::optional<SolveReport> report;
  std::vector<CycleStep> iterations;  // only filled when no equilibrium
  bool cycle_detected = false;
};

/// Tolerance for the mutual-best-response check.
inline constexpr double kBestResponseGap = 1e-9;

/// exists = (H >= 0) and the vertical outcome is a mutual best response.
/// Otherwise runs up to `max_iterations` alternating best responses from the
/// vertical contract and records them.
HorizontalVerdict check_horizontal_equilibrium(const Scenario& scenario, int max_iterations = 100);

}  // namespace fedprice

#endif  // FEDPRICE_HORIZONTAL_HPP
