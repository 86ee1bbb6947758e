// The users' non-cooperative game: participation, contract item, upload slot.

#ifndef FEDPRICE_USER_GAME_HPP
#define FEDPRICE_USER_GAME_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "fedprice/model.hpp"

namespace fedprice {

/// Absolute payoff tolerance for "strictly profitable" deviations.
inline constexpr double kDeviationTolerance = 1e-9;

/// Choices of individual users. Users are laid out type by type: the first
/// I_0 users are type 0, the next I_1 are type 1, and so on.
struct UserAssignment {
  struct Choice {
    std::optional<std::size_t> item;
    std::optional<std::size_t> slot;
    bool participates() const { return item.has_value(); }
  };

  std::vector<std::size_t> user_type;
  std::vector<Choice> choices;

  /// Everybody opted out.
  static UserAssignment idle(const Scenario& scenario);

  std::size_t participants() const;
  /// Integer per-slot counts.
  DemandDistribution demand(std::size_t num_slots) const;
};

struct DynamicsResult {
  UserAssignment assignment;
  bool converged = false;
  int rounds = 0;
};

/// Asynchronous best-response dynamics. Each round visits users in a seeded
/// random order; a user moves to its best (item, slot) or opts out whenever
/// that gains more than kDeviationTolerance (joining at zero payoff is
/// allowed). Stops after a round with no move or after `max_rounds`.
DynamicsResult best_response_dynamics(const Scenario& scenario, const Contract& contract,
                                      const PriceSchedule& prices, std::uint64_t seed,
                                      int max_rounds,
                                      std::optional<UserAssignment> start = std::nullopt);

/// Largest payoff gain any single user can get by switching item, slot, or
/// participation. Exhaustive over all alternatives.
double max_deviation_gain(const Scenario& scenario, const Contract& contract,
                          const PriceSchedule& prices, const UserAssignment& assignment);

/// Granularity slack for integer assignments: one extra user in the busiest
/// slot changes its congestion cost by at most beta (2 L_max + 1), where L_max
/// is the largest total load n_t + h(t).
double integer_slack(const Scenario& scenario, const DemandDistribution& demand);

/// Every selected slot has the same user network cost (within `tolerance`) and
/// every unselected slot costs at least that much at zero load. Default
/// tolerance: 1e-6 for continuous demand, integer_slack() for integer demand.
/// Throws InputError when nobody participates.
bool verify_equal_cost_equilibrium(const Scenario& scenario, const PriceSchedule& prices,
                                   const DemandDistribution& demand,
                                   std::optional<double> tolerance = std::nullopt);

/// c(p) = min_t p(t) + beta (n_t + h(t))^2.
double common_network_cost(const Scenario& scenario, const PriceSchedule& prices,
                           const DemandDistribution& demand);

struct ItemChoice {
  std::optional<std::size_t> item;
  double payoff = 0.0;  // 0 when opting out
};

/// Relative slack for "payoff >= 0" in participation checks. The threshold
/// type's IR binds exactly, so its computed payoff is zero only up to rounding.
inline constexpr double kParticipationTolerance = 1e-12;

/// Per type, the payoff-maximizing nonzero item at network cost `c`, or
/// nothing if the best payoff is negative (beyond kParticipationTolerance).
/// Ties go to the type's own item, then to the lowest index.
std::vector<ItemChoice> contract_item_choice(const Scenario& scenario, const Contract& contract,
                                             double c);

/// Best surplus r_k - theta d_k over nonzero items, i.e. the largest network
/// cost the type would pay. Empty when the contract offers nothing.
std::optional<double> surplus_budget(const Contract& contract, double theta);

struct SlotEquilibrium {
  DemandDistribution demand;
  double cost = 0.0;  // common network cost of the selected slots
};

/// Continuous split of `users` participants over slots under fixed prices: all
/// used slots share the lowest network cost. With beta = 0 the users fill the
/// cheapest slots to a common water level.
SlotEquilibrium slot_equilibrium(const Scenario& scenario, const PriceSchedule& prices,
                                 double users);

/// Integer assignment from per-type item choices and integer slot counts.
/// Users are placed type by type into slots in index order.
UserAssignment assignment_from_counts(const Scenario& scenario,
                                      const std::vector<std::optional<std::size_t>>& type_items,
                                      const DemandDistribution& integer_demand);

}  // namespace fedprice

#endif  // FEDPRICE_USER_GAME_HPP
