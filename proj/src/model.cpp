#include "fedprice/model.hpp"

#include <cmath>
#include <numeric>

namespace fedprice {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

}  // namespace

int Scenario::total_users() const { return users_up_to(types.size()); }

int Scenario::users_up_to(std::size_t x) const {
  int total = 0;
  for (std::size_t j = 0; j < x && j < types.size(); ++j) total += types[j].count;
  return total;
}

void Scenario::validate() const {
  require(!background.empty(), "num_slots must be positive");
  for (double h : background) {
    require(std::isfinite(h) && h >= 0.0, "background_usage must be finite and nonnegative");
  }
  require(std::isfinite(price_cap) && price_cap >= 0.0, "price_cap must be nonnegative");
  require(std::isfinite(congestion) && congestion >= 0.0, "beta must be nonnegative");
  require(std::isfinite(operator_cost) && operator_cost > 0.0, "gamma must be positive");
  require(std::isfinite(reward_weight) && reward_weight > 0.0, "xi must be positive");
  require(std::isfinite(d_max) && d_max > 0.0, "d_max must be positive");
  require(!types.empty(), "user_types must not be empty");
  for (std::size_t j = 0; j < types.size(); ++j) {
    require(std::isfinite(types[j].theta) && types[j].theta > 0.0,
            "user_types.theta must be positive");
    require(types[j].count > 0, "user_types.count must be positive");
    if (j > 0) {
      require(types[j].theta > types[j - 1].theta, "user_types.theta not strictly increasing");
    }
  }
}

double DemandDistribution::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

std::vector<std::size_t> DemandDistribution::selected_slots() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] > 0.0) out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> DemandDistribution::unselected_slots() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (!(counts[t] > 0.0)) out.push_back(t);
  }
  return out;
}

double SolveReport::total_user_payoff(const Scenario& scenario) const {
  double total = 0.0;
  for (std::size_t j = 0; j < user_payoffs.size() && j < scenario.num_types(); ++j) {
    total += scenario.types[j].count * user_payoffs[j];
  }
  return total;
}

std::size_t SolveReport::participants(const Scenario& scenario) const {
  std::size_t total = 0;
  for (std::size_t j = 0; j < choices.size() && j < scenario.num_types(); ++j) {
    if (choices[j]) total += static_cast<std::size_t>(scenario.types[j].count);
  }
  return total;
}

void check_shapes(const Scenario& scenario, const PriceSchedule& prices,
                  const DemandDistribution& demand) {
  require(prices.prices.size() == scenario.num_slots(), "prices: expected one entry per slot");
  require(demand.counts.size() == scenario.num_slots(), "demand: expected one entry per slot");
}

double network_cost_of_slot(const Scenario& scenario, const PriceSchedule& prices,
                            const DemandDistribution& demand, std::size_t slot) {
  check_shapes(scenario, prices, demand);
  require(slot < scenario.num_slots(), "slot index out of range");
  const double load = demand.counts[slot] + scenario.background[slot];
  return prices.prices[slot] + scenario.congestion * load * load;
}

double user_payoff(const Scenario& scenario, const ContractItem& item, double theta,
                   std::size_t slot, const DemandDistribution& demand,
                   const PriceSchedule& prices) {
  return item.reward - theta * item.data -
         network_cost_of_slot(scenario, prices, demand, slot);
}

double server_cost(const Scenario& scenario, const Contract& contract) {
  require(contract.items.size() == scenario.num_types(), "contract: expected one item per type");
  std::vector<std::optional<std::size_t>> own(scenario.num_types());
  for (std::size_t j = 0; j < own.size(); ++j) {
    if (!contract.items[j].is_zero()) own[j] = j;
  }
  return server_cost(scenario, contract, own);
}

double server_cost(const Scenario& scenario, const Contract& contract,
                   const std::vector<std::optional<std::size_t>>& choices) {
  require(choices.size() == scenario.num_types(), "choices: expected one entry per type");
  double data = 0.0;
  double rewards = 0.0;
  for (std::size_t j = 0; j < choices.size(); ++j) {
    if (!choices[j]) continue;
    require(*choices[j] < contract.items.size(), "choices: item index out of range");
    const ContractItem& item = contract.items[*choices[j]];
    data += scenario.types[j].count * item.data;
    rewards += scenario.types[j].count * item.reward;
  }
  if (!(data > 0.0)) return kInfiniteCost;
  return 1.0 / std::sqrt(data) + scenario.reward_weight * rewards;
}

double operator_profit(const Scenario& scenario, const PriceSchedule& prices,
                       const DemandDistribution& demand) {
  check_shapes(scenario, prices, demand);
  double revenue = 0.0;
  double cost = 0.0;
  for (std::size_t t = 0; t < scenario.num_slots(); ++t) {
    const double load = demand.counts[t] + scenario.background[t];
    revenue += demand.counts[t] * prices.prices[t];
    cost += load * load;
  }
  return revenue - scenario.operator_cost * cost;
}

}  // namespace fedprice
