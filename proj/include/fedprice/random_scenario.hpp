// Random small market instances for property checks.

#ifndef FEDPRICE_RANDOM_SCENARIO_HPP
#define FEDPRICE_RANDOM_SCENARIO_HPP

#include <random>

#include "fedprice/model.hpp"

namespace fedprice {

struct RandomScenarioOptions {
  std::size_t max_types = 3;
  std::size_t max_slots = 3;
  int max_users_per_type = 3;
  bool zero_congestion = false;  // beta = 0
};

Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& options = {});

}  // namespace fedprice

#endif  // FEDPRICE_RANDOM_SCENARIO_HPP
