// Core market data model: scenario, contract, prices, demand, and the three
// payoff functionals (users, server, network operator).
//
// Indexing is zero-based throughout: slot t in [0, T), type j in [0, J).
// A "threshold" is a count: threshold x means types [0, x) are incentivized,
// and x == 0 encodes "nobody incentivized".
//
// Units follow the replication setting: currency in cents, data in MB,
// usage in normalized user counts.

#ifndef FEDPRICE_MODEL_HPP
#define FEDPRICE_MODEL_HPP

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedprice {

/// Invalid input (bad scenario field, index out of range, shape mismatch).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver could not find a point satisfying its optimality conditions.
class NumericalInfeasibility : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Server cost of a contract that buys no data. Compares above every finite
/// cost, so argmin code needs no special case.
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

struct UserType {
  double theta = 0.0;  // marginal data cost
  int count = 0;       // number of users of this type
};

struct Scenario {
  std::vector<double> background;  // h(t), one entry per slot
  double price_cap = 0.0;          // p0
  double congestion = 0.0;         // beta, users' congestion weight
  double operator_cost = 1.0;      // gamma, operator's network cost weight
  double reward_weight = 1.0;      // xi, server's weight on rewards
  std::vector<UserType> types;     // strictly increasing theta
  double d_max = 1.0;

  std::size_t num_slots() const { return background.size(); }
  std::size_t num_types() const { return types.size(); }
  int total_users() const;
  /// Number of users in the first `x` types.
  int users_up_to(std::size_t x) const;

  /// Throws InputError naming the offending field.
  void validate() const;
};

struct ContractItem {
  double data = 0.0;
  double reward = 0.0;

  /// The (0, 0) item: the type is not incentivized.
  bool is_zero() const { return data == 0.0 && reward == 0.0; }
};

struct Contract {
  std::vector<ContractItem> items;  // one per type

  static Contract zeros(std::size_t num_types) {
    return Contract{std::vector<ContractItem>(num_types)};
  }
};

struct PriceSchedule {
  std::vector<double> prices;

  static PriceSchedule uniform(std::size_t num_slots, double p) {
    return PriceSchedule{std::vector<double>(num_slots, p)};
  }
};

/// Per-slot count of participating users. Solver paths produce real-valued
/// counts (a continuous relaxation); simulation paths produce integers and set
/// `integral`.
struct DemandDistribution {
  std::vector<double> counts;
  bool integral = false;

  static DemandDistribution empty(std::size_t num_slots) {
    return DemandDistribution{std::vector<double>(num_slots, 0.0), false};
  }

  double total() const;
  /// Slots with positive count (Q).
  std::vector<std::size_t> selected_slots() const;
  /// Slots with zero count (complement of Q).
  std::vector<std::size_t> unselected_slots() const;
};

/// Equilibrium outcome of one mechanism.
struct SolveReport {
  Contract contract;
  PriceSchedule prices;
  DemandDistribution demand;
  std::size_t threshold = 0;       // x*; 0 = nobody incentivized
  double common_cost = 0.0;        // c(p)
  double server_cost = kInfiniteCost;
  double operator_profit = 0.0;
  std::vector<double> user_payoffs;                   // per type
  std::vector<std::optional<std::size_t>> choices;    // item chosen per type

  double total_user_payoff(const Scenario& scenario) const;
  std::size_t participants(const Scenario& scenario) const;
};

/// W_U for a user of cost `theta` holding `item` in `slot`. `demand` must
/// already count this user in its slot.
double user_payoff(const Scenario& scenario, const ContractItem& item, double theta,
                   std::size_t slot, const DemandDistribution& demand,
                   const PriceSchedule& prices);

/// W_S = 1/sqrt(sum I_j d_j) + xi * sum I_j r_j, assuming each type takes its
/// own item. Returns kInfiniteCost when no data is bought.
double server_cost(const Scenario& scenario, const Contract& contract);

/// W_S from realized choices: type j takes `choices[j]` (or nothing).
double server_cost(const Scenario& scenario, const Contract& contract,
                   const std::vector<std::optional<std::size_t>>& choices);

/// W_O = sum_t n_t p(t) - gamma * sum_t (n_t + h(t))^2 over all slots.
double operator_profit(const Scenario& scenario, const PriceSchedule& prices,
                       const DemandDistribution& demand);

/// p(t) + beta (n_t + h(t))^2.
double network_cost_of_slot(const Scenario& scenario, const PriceSchedule& prices,
                            const DemandDistribution& demand, std::size_t slot);

/// Throws InputError unless prices and demand have one entry per slot.
void check_shapes(const Scenario& scenario, const PriceSchedule& prices,
                  const DemandDistribution& demand);

}  // namespace fedprice

#endif  // FEDPRICE_MODEL_HPP
