// Brute-force reference computations. Deliberately naive: they share no
// solver code with the library beyond the data model.

#ifndef FEDPRICE_TESTS_ORACLES_HPP
#define FEDPRICE_TESTS_ORACLES_HPP

#include <functional>
#include <vector>

#include "fedprice/model.hpp"

namespace oracle {

using fedprice::PriceSchedule;
using fedprice::Scenario;

// Least rewards meeting IR (r_j >= theta_j d_j + c) and IC among the listed
// types, by longest paths over the difference constraints (Bellman-Ford).
std::vector<double> least_rewards(const Scenario& s, const std::vector<double>& data,
                                  const std::vector<std::size_t>& incentivized, double c);

// W_S = 1/sqrt(sum I d) + xi sum I r over the incentivized types.
double server_cost(const Scenario& s, const std::vector<double>& data, const std::vector<double>& rewards,
                   const std::vector<std::size_t>& incentivized);

struct GridContract {
  double cost = fedprice::kInfiniteCost;
  std::size_t threshold = 0;
  std::vector<double> data;
  double resolution = 0.0;  // grid step
};

// Minimum W_S over thresholds x and nonincreasing data vectors on a uniform
// grid of `points` values in (0, d_max], with least rewards.
GridContract grid_contract(const Scenario& s, double c, int points = 50);

// Operator-optimal continuous demand: n_t = max(0, root_t(lambda)) over all
// slots, one global bisection on lambda.
std::vector<double> kkt_demand(const Scenario& s, double users);

// Users' continuous slot split under fixed prices; bisection on the common cost.
struct Split {
  std::vector<double> counts;
  double cost = 0.0;
};
Split slot_split(const Scenario& s, const std::vector<double>& prices, double users);

// Downstream outcome at given prices: each threshold x is tried; x is kept
// when the server's own best threshold at the realized cost is x (ties
// allowed); the operator-best consistent x is played.
struct Downstream {
  std::size_t threshold = 0;
  double cost = 0.0;
  double profit = 0.0;
};
Downstream downstream(const Scenario& s, const std::vector<double>& prices);

struct GridPricing {
  double profit = -fedprice::kInfiniteCost;
  std::vector<double> prices;
  double resolution = 0.0;
};

// Exhaustive search over `points`^T price vectors in [0, p0]^T.
GridPricing grid_pricing(const Scenario& s, int points);

// Minimizer of a unimodal-ish scalar function: dense scan then golden section.
double minimize_1d(const std::function<double(double)>& f, double a, double b, int scan = 10000);

}  // namespace oracle

#endif  // FEDPRICE_TESTS_ORACLES_HPP
