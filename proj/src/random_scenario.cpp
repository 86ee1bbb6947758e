#include "fedprice/random_scenario.hpp"

namespace fedprice {

Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& options) {
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

  Scenario s;
  const std::size_t J = pick(1, options.max_types);
  const std::size_t T = pick(1, options.max_slots);
  double theta = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    theta += uniform(0.2, 2.0);
    s.types.push_back(UserType{theta, static_cast<int>(pick(1, static_cast<std::size_t>(options.max_users_per_type)))});
  }
  for (std::size_t t = 0; t < T; ++t) s.background.push_back(uniform(0.0, 4.0));
  s.congestion = options.zero_congestion ? 0.0 : uniform(0.01, 1.0);
  s.operator_cost = uniform(0.01, 1.0);
  s.reward_weight = uniform(1e-3, 0.1);
  s.d_max = uniform(1.0, 10.0);
  s.price_cap = uniform(2.0, 40.0);
  return s;
}

}  // namespace fedprice
