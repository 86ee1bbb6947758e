// Downstream (server + users) response to an arbitrary price schedule.
//
// The server treats the common network cost as given when it compares
// thresholds, exactly as in the operator's own pricing problem. For each
// threshold x the users' slot equilibrium with S_x participants gives a
// realized cost c_x; x is self-consistent when the server still prefers x at
// c_x. Among self-consistent thresholds the one best for the operator is
// played (leader-favorable tie-breaking); if none exists the server's
// cheapest threshold at its own realized cost is played.

#ifndef FEDPRICE_RESPONSE_HPP
#define FEDPRICE_RESPONSE_HPP

#include "fedprice/contract.hpp"
#include "fedprice/model.hpp"

namespace fedprice {

struct DownstreamOption {
  std::size_t threshold = 0;
  double common_cost = 0.0;
  double server_cost = kInfiniteCost;
  double operator_profit = 0.0;
  bool consistent = false;
};

std::vector<DownstreamOption> downstream_options(const Scenario& scenario,
                                                 const PriceSchedule& prices,
                                                 const ServerCostLines& lines);

SolveReport downstream_response(const Scenario& scenario, const PriceSchedule& prices);
SolveReport downstream_response(const Scenario& scenario, const PriceSchedule& prices,
                                const ServerCostLines& lines);

}  // namespace fedprice

#endif  // FEDPRICE_RESPONSE_HPP
