// Server-side contract design under private user types.
//
// For fixed data sizes the cheapest incentive-compatible rewards pay the
// highest incentivized type exactly its training plus network cost, and every
// cheaper type an information rent on top (optimal_rewards). The data sizes
// are then chosen by scanning the incentivized threshold.

#ifndef FEDPRICE_CONTRACT_HPP
#define FEDPRICE_CONTRACT_HPP

#include <optional>
#include <span>
#include <vector>

#include "fedprice/model.hpp"

namespace fedprice {

/// Minimal IR/IC rewards for data sizes `data` (one per type) when the types
/// listed in `incentivized` (ascending) participate at network cost `c`.
/// Types outside the set get reward 0.
std::vector<double> optimal_rewards(const Scenario& scenario, std::span<const double> data,
                                    std::span<const std::size_t> incentivized, double c);

struct ThresholdCost {
  double cost = kInfiniteCost;
  double threshold_data = 0.0;  // d of the threshold type
  bool feasible = false;
};

/// Server cost when types [0, x) are incentivized, every type below the
/// threshold gets d_max, and the threshold type's data size is the stationary
/// point of W_S clamped to (0, d_max]. Infeasible (cost +inf) when the
/// stationary point is not positive. Requires 1 <= x <= J.
ThresholdCost server_cost_at_threshold(const Scenario& scenario, std::size_t x, double c);

/// A threshold design with pooling: types [0, pool_start) get d_max and types
/// [pool_start, x) share one data size `pooled_data`. pool_start == x - 1 is
/// the unpooled design of server_cost_at_threshold.
struct ThresholdDesign {
  std::size_t threshold = 0;
  std::size_t pool_start = 0;
  double pooled_data = 0.0;
  double cost_at_zero = kInfiniteCost;  // W_S at c = 0
  bool feasible = false;

  std::vector<double> data(const Scenario& scenario) const;
};

/// Cheapest design for threshold x over all pool starts, at c = 0.
/// W_S(x, c) = cost_at_zero + xi * S_x * c, so the design itself does not
/// depend on c.
ThresholdDesign best_threshold_design(const Scenario& scenario, std::size_t x);

/// W_S(x, c) for every threshold, as lines in c.
struct ServerCostLines {
  std::vector<ThresholdDesign> designs;  // index x - 1
  std::vector<double> slopes;            // xi * S_x

  static ServerCostLines build(const Scenario& scenario);
  double cost(std::size_t x, double c) const;
  bool feasible(std::size_t x) const { return designs.at(x - 1).feasible; }

  /// Largest c at which threshold x is weakly preferred to every smaller
  /// threshold (+inf if unconstrained).
  double upper_preference(std::size_t x) const;
  /// Smallest c at which threshold x is weakly preferred to every larger
  /// threshold (-inf if unconstrained).
  double lower_preference(std::size_t x) const;
};

struct ContractSolution {
  Contract contract;
  std::size_t threshold = 0;
  double common_cost = 0.0;
  double server_cost = kInfiniteCost;
  std::size_t pool_start = 0;
};

/// Relative tolerance used when comparing server costs across thresholds.
inline constexpr double kCostTieTolerance = 1e-12;

/// Server's optimal contract at common network cost c. Argmin ties go to
/// `preferred` when it is among the tied thresholds, else to the smaller one.
ContractSolution optimal_contract(const Scenario& scenario, double c,
                                  std::optional<std::size_t> preferred = std::nullopt);

/// Same, with c taken as the common network cost of `demand` under `prices`.
ContractSolution optimal_contract(const Scenario& scenario, const PriceSchedule& prices,
                                  const DemandDistribution& demand);

/// Contract realizing `design` at network cost c.
Contract contract_for_design(const Scenario& scenario, const ThresholdDesign& design, double c);

}  // namespace fedprice

#endif  // FEDPRICE_CONTRACT_HPP
