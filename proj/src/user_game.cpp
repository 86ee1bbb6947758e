#include "fedprice/user_game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace fedprice {

namespace {

struct BestItem {
  std::optional<std::size_t> item;
  double surplus = 0.0;  // r - theta d
};

BestItem best_item(const Contract& contract, double theta, std::size_t own_type) {
  BestItem best;
  for (std::size_t k = 0; k < contract.items.size(); ++k) {
    const ContractItem& it = contract.items[k];
    if (it.is_zero()) continue;
    const double s = it.reward - theta * it.data;
    if (!best.item || s > best.surplus ||
        (s == best.surplus && k == own_type && *best.item != own_type)) {
      best.item = k;
      best.surplus = s;
    }
  }
  return best;
}

double slot_cost(const Scenario& scenario, const PriceSchedule& prices, std::size_t t,
                 double count) {
  const double load = count + scenario.background[t];
  return prices.prices[t] + scenario.congestion * load * load;
}

}  // namespace

UserAssignment UserAssignment::idle(const Scenario& scenario) {
  UserAssignment a;
  for (std::size_t j = 0; j < scenario.num_types(); ++j) {
    a.user_type.insert(a.user_type.end(), static_cast<std::size_t>(scenario.types[j].count), j);
  }
  a.choices.resize(a.user_type.size());
  return a;
}

std::size_t UserAssignment::participants() const {
  return static_cast<std::size_t>(
      std::count_if(choices.begin(), choices.end(), [](const Choice& c) { return c.participates(); }));
}

DemandDistribution UserAssignment::demand(std::size_t num_slots) const {
  DemandDistribution d{std::vector<double>(num_slots, 0.0), true};
  for (const Choice& c : choices) {
    if (c.participates()) d.counts.at(*c.slot) += 1.0;
  }
  return d;
}

std::optional<double> surplus_budget(const Contract& contract, double theta) {
  std::optional<double> best;
  for (const ContractItem& it : contract.items) {
    if (it.is_zero()) continue;
    const double s = it.reward - theta * it.data;
    if (!best || s > *best) best = s;
  }
  return best;
}

DynamicsResult best_response_dynamics(const Scenario& scenario, const Contract& contract,
                                      const PriceSchedule& prices, std::uint64_t seed,
                                      int max_rounds, std::optional<UserAssignment> start) {
  if (prices.prices.size() != scenario.num_slots()) {
    throw InputError("prices: expected one entry per slot");
  }
  if (max_rounds < 1) throw InputError("max_rounds must be at least 1");

  DynamicsResult result;
  result.assignment = start ? std::move(*start) : UserAssignment::idle(scenario);
  UserAssignment& a = result.assignment;
  const std::size_t T = scenario.num_slots();
  std::vector<double> load = a.demand(T).counts;

  std::vector<BestItem> type_best(scenario.num_types());
  for (std::size_t j = 0; j < scenario.num_types(); ++j) {
    type_best[j] = best_item(contract, scenario.types[j].theta, j);
  }

  std::vector<std::size_t> order(a.choices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);

  for (int round = 1; round <= max_rounds; ++round) {
    result.rounds = round;
    std::shuffle(order.begin(), order.end(), rng);
    bool moved = false;
    for (std::size_t u : order) {
      const std::size_t type = a.user_type[u];
      const double theta = scenario.types[type].theta;
      UserAssignment::Choice& choice = a.choices[u];

      double current = 0.0;
      if (choice.participates()) {
        const ContractItem& it = contract.items[*choice.item];
        current = it.reward - theta * it.data - slot_cost(scenario, prices, *choice.slot, load[*choice.slot]);
      }

      const BestItem& bi = type_best[type];
      std::optional<std::size_t> best_slot;
      double best_cost = 0.0;
      if (bi.item) {
        for (std::size_t t = 0; t < T; ++t) {
          const bool here = choice.participates() && *choice.slot == t;
          const double cost = slot_cost(scenario, prices, t, load[t] + (here ? 0.0 : 1.0));
          if (!best_slot || cost < best_cost) {
            best_slot = t;
            best_cost = cost;
          }
        }
      }

      bool join = false;
      bool leave = false;
      if (best_slot) {
        const double best = bi.surplus - best_cost;
        if (best >= 0.0 && (!choice.participates() || best > current + kDeviationTolerance)) {
          join = !(choice.participates() && *choice.item == *bi.item && *choice.slot == *best_slot);
        } else if (best < 0.0 && choice.participates() && current < -kDeviationTolerance) {
          leave = true;
        }
      } else if (choice.participates() && current < -kDeviationTolerance) {
        leave = true;
      }

      if (join || leave) {
        if (choice.participates()) load[*choice.slot] -= 1.0;
        if (join) {
          choice.item = bi.item;
          choice.slot = best_slot;
          load[*best_slot] += 1.0;
        } else {
          choice.item.reset();
          choice.slot.reset();
        }
        moved = true;
      }
    }
    if (!moved) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double max_deviation_gain(const Scenario& scenario, const Contract& contract,
                          const PriceSchedule& prices, const UserAssignment& assignment) {
  const std::size_t T = scenario.num_slots();
  if (prices.prices.size() != T) throw InputError("prices: expected one entry per slot");
  const std::vector<double> load = assignment.demand(T).counts;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < assignment.choices.size(); ++u) {
    const auto& choice = assignment.choices[u];
    const double theta = scenario.types[assignment.user_type[u]].theta;
    double current = 0.0;
    if (choice.participates()) {
      const ContractItem& it = contract.items.at(*choice.item);
      current = it.reward - theta * it.data - slot_cost(scenario, prices, *choice.slot, load[*choice.slot]);
    }
    double best_alt = 0.0;  // opting out
    for (std::size_t k = 0; k < contract.items.size(); ++k) {
      const ContractItem& it = contract.items[k];
      if (it.is_zero()) continue;
      for (std::size_t t = 0; t < T; ++t) {
        const bool here = choice.participates() && *choice.slot == t;
        const double alt = it.reward - theta * it.data -
                           slot_cost(scenario, prices, t, load[t] + (here ? 0.0 : 1.0));
        best_alt = std::max(best_alt, alt);
      }
    }
    worst = std::max(worst, best_alt - current);
  }
  return assignment.choices.empty() ? 0.0 : worst;
}

double integer_slack(const Scenario& scenario, const DemandDistribution& demand) {
  double max_load = 0.0;
  for (std::size_t t = 0; t < scenario.num_slots(); ++t) {
    max_load = std::max(max_load, demand.counts.at(t) + scenario.background[t]);
  }
  return scenario.congestion * (2.0 * max_load + 1.0);
}

bool verify_equal_cost_equilibrium(const Scenario& scenario, const PriceSchedule& prices,
                                   const DemandDistribution& demand,
                                   std::optional<double> tolerance) {
  check_shapes(scenario, prices, demand);
  const auto selected = demand.selected_slots();
  if (selected.empty()) throw InputError("equal-cost check needs at least one participant");
  const double tol = tolerance.value_or(demand.integral ? integer_slack(scenario, demand) : 1e-6);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t t : selected) {
    const double c = slot_cost(scenario, prices, t, demand.counts[t]);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  if (hi - lo > tol) return false;
  for (std::size_t t : demand.unselected_slots()) {
    if (slot_cost(scenario, prices, t, 0.0) < lo - tol) return false;
  }
  return true;
}

double common_network_cost(const Scenario& scenario, const PriceSchedule& prices,
                           const DemandDistribution& demand) {
  check_shapes(scenario, prices, demand);
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < scenario.num_slots(); ++t) {
    c = std::min(c, slot_cost(scenario, prices, t, demand.counts[t]));
  }
  return c;
}

std::vector<ItemChoice> contract_item_choice(const Scenario& scenario, const Contract& contract,
                                             double c) {
  if (contract.items.size() != scenario.num_types()) {
    throw InputError("contract: expected one item per type");
  }
  std::vector<ItemChoice> out(scenario.num_types());
  for (std::size_t j = 0; j < scenario.num_types(); ++j) {
    const BestItem bi = best_item(contract, scenario.types[j].theta, j);
    const double slack = kParticipationTolerance * std::max({1.0, std::fabs(bi.surplus), std::fabs(c)});
    if (bi.item && bi.surplus - c >= -slack) out[j] = ItemChoice{bi.item, bi.surplus - c};
  }
  return out;
}

SlotEquilibrium slot_equilibrium(const Scenario& scenario, const PriceSchedule& prices,
                                 double users) {
  const std::size_t T = scenario.num_slots();
  if (prices.prices.size() != T) throw InputError("prices: expected one entry per slot");
  if (!(users >= 0.0)) throw InputError("users must be nonnegative");
  const double beta = scenario.congestion;
  const auto& h = scenario.background;
  const auto& p = prices.prices;

  SlotEquilibrium eq{DemandDistribution::empty(T), 0.0};
  double empty_cost = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < T; ++t) empty_cost = std::min(empty_cost, p[t] + beta * h[t] * h[t]);
  if (users == 0.0) {
    eq.cost = empty_cost;
    return eq;
  }

  if (beta == 0.0) {
    // Cheapest slots only; split them by water-filling on background usage.
    const double pmin = *std::min_element(p.begin(), p.end());
    std::vector<std::size_t> cheap;
    for (std::size_t t = 0; t < T; ++t) {
      if (p[t] == pmin) cheap.push_back(t);
    }
    std::sort(cheap.begin(), cheap.end(), [&](std::size_t a, std::size_t b) {
      return h[a] < h[b] || (h[a] == h[b] && a < b);
    });
    // Active prefix: level v = (users + sum h) / k must exceed the next h.
    double sum_h = 0.0;
    double level = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < cheap.size(); ++k) {
      sum_h += h[cheap[k]];
      level = (users + sum_h) / static_cast<double>(k + 1);
      active = k + 1;
      if (k + 1 == cheap.size() || level <= h[cheap[k + 1]]) break;
    }
    for (std::size_t k = 0; k < active; ++k) {
      eq.demand.counts[cheap[k]] = std::max(0.0, level - h[cheap[k]]);
    }
    eq.cost = pmin;
    return eq;
  }

  auto fill = [&](double c) {
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double room = c - p[t];
      if (room > 0.0) total += std::max(0.0, std::sqrt(room / beta) - h[t]);
    }
    return total;
  };
  double lo = empty_cost;
  double hi = empty_cost;
  for (std::size_t t = 0; t < T; ++t) hi = std::max(hi, p[t] + beta * (users + h[t]) * (users + h[t]));
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (fill(mid) < users ? lo : hi) = mid;
  }
  eq.cost = hi;
  for (std::size_t t = 0; t < T; ++t) {
    const double room = hi - p[t];
    if (room > 0.0) eq.demand.counts[t] = std::max(0.0, std::sqrt(room / beta) - h[t]);
  }
  return eq;
}

UserAssignment assignment_from_counts(const Scenario& scenario,
                                      const std::vector<std::optional<std::size_t>>& type_items,
                                      const DemandDistribution& integer_demand) {
  if (type_items.size() != scenario.num_types()) {
    throw InputError("type_items: expected one entry per type");
  }
  if (integer_demand.counts.size() != scenario.num_slots()) {
    throw InputError("demand: expected one entry per slot");
  }
  UserAssignment a = UserAssignment::idle(scenario);
  std::vector<long> remaining(scenario.num_slots());
  long total = 0;
  for (std::size_t t = 0; t < remaining.size(); ++t) {
    remaining[t] = std::lround(integer_demand.counts[t]);
    total += remaining[t];
  }
  long wanted = 0;
  for (std::size_t j = 0; j < type_items.size(); ++j) {
    if (type_items[j]) wanted += scenario.types[j].count;
  }
  if (wanted != total) throw InputError("demand total does not match participating users");

  std::size_t slot = 0;
  for (std::size_t u = 0; u < a.choices.size(); ++u) {
    const auto& item = type_items[a.user_type[u]];
    if (!item) continue;
    while (remaining[slot] == 0) ++slot;
    a.choices[u].item = *item;
    a.choices[u].slot = slot;
    --remaining[slot];
  }
  return a;
}

}  // namespace fedprice
