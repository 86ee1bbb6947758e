// Small scenario builders shared by the test binaries.

#ifndef FEDPRICE_TESTS_FIXTURES_HPP
#define FEDPRICE_TESTS_FIXTURES_HPP

#include <filesystem>
#include <vector>

#include "fedprice/model.hpp"

namespace fixture {

inline fedprice::Scenario make(std::vector<double> h, std::vector<double> theta, std::vector<int> count,
                               double beta = 1.0, double gamma = 1.0, double xi = 1.0, double d_max = 10.0,
                               double p0 = 100.0) {
  fedprice::Scenario s;
  s.background = std::move(h);
  s.congestion = beta;
  s.operator_cost = gamma;
  s.reward_weight = xi;
  s.d_max = d_max;
  s.price_cap = p0;
  for (std::size_t j = 0; j < theta.size(); ++j) s.types.push_back({theta[j], count[j]});
  return s;
}

inline std::filesystem::path replication_file() {
  return std::filesystem::path(FEDPRICE_DATA_DIR) / "replication.json";
}

}  // namespace fixture

#endif  // FEDPRICE_TESTS_FIXTURES_HPP
