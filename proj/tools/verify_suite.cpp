#include "verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fedprice/benchmarks.hpp"
#include "fedprice/contract.hpp"
#include "fedprice/horizontal.hpp"
#include "fedprice/operator_pricing.hpp"
#include "fedprice/random_scenario.hpp"
#include "fedprice/user_game.hpp"

namespace fedprice::tools {

namespace {

struct Tally {
  std::ostream& out;
  int failures = 0;

  void record(const std::string& name, bool ok, const std::string& detail = "") {
    out << (ok ? "ok    " : "FAIL  ") << name;
    if (!detail.empty()) out << "  (" << detail << ")";
    out << '\n';
    if (!ok) ++failures;
  }
};

double scale_of(double v) { return std::max(1.0, std::fabs(v)); }

// Largest gain any type gets by taking another type's item.
double ic_violation(const Scenario& s, const Contract& contract, std::size_t threshold) {
  double worst = 0.0;
  for (std::size_t j = 0; j < threshold; ++j) {
    const double theta = s.types[j].theta;
    const double own = contract.items[j].reward - theta * contract.items[j].data;
    for (const ContractItem& other : contract.items) {
      worst = std::max(worst, other.reward - theta * other.data - own);
    }
  }
  return worst;
}

bool report_checks(const Scenario& s, const SolveReport& r, std::string& why) {
  if (r.threshold == 0) return true;
  for (double p : r.prices.prices) {
    if (p < -1e-12 || p > s.price_cap * (1 + 1e-12) + 1e-12) {
      why = "price outside [0, p0]";
      return false;
    }
  }
  if (ic_violation(s, r.contract, r.threshold) > 1e-9 * scale_of(r.contract.items[0].reward)) {
    why = "IC violated";
    return false;
  }
  if (std::fabs(r.user_payoffs[r.threshold - 1]) > 1e-9 * scale_of(r.contract.items[0].reward)) {
    why = "threshold type payoff not zero";
    return false;
  }
  if (!verify_equal_cost_equilibrium(s, r.prices, r.demand)) {
    why = "slot costs not equal";
    return false;
  }
  return true;
}

}  // namespace

int run_verification(const Scenario& scenario, int trials, std::uint64_t seed, std::ostream& out) {
  Tally tally{out};

  const SolveReport vertical = optimal_operator_solution(scenario);
  std::string why;
  tally.record("vertical: IC, IR, price cap, equal slot cost", report_checks(scenario, vertical, why), why);

  if (vertical.threshold > 0 && scenario.congestion > 0.0) {
    const KktSolution kkt = optimal_demand_distribution(scenario, scenario.users_up_to(vertical.threshold));
    tally.record("vertical: demand mass conservation", std::fabs(kkt.residual) <= 1e-9 * scale_of(kkt.demand.total()));

    const DemandDistribution rounded = round_largest_remainder(vertical.demand, scenario.users_up_to(vertical.threshold));
    const UserAssignment start = assignment_from_counts(scenario, vertical.choices, rounded);
    const double gain = max_deviation_gain(scenario, vertical.contract, vertical.prices, start);
    const double slack = integer_slack(scenario, rounded);
    tally.record("vertical: integer assignment within granularity slack", gain <= slack,
                 "gain " + std::to_string(gain) + ", slack " + std::to_string(slack));
  }

  const HorizontalVerdict hv = check_horizontal_equilibrium(scenario);
  tally.record("horizontal: sign(H) matches mutual best response", (hv.h.value >= 0.0) == hv.mutual_best_response);

  std::mt19937_64 rng(seed);
  int ic_fail = 0, ndp_fail = 0, njo_fail = 0, h_fail = 0, errors = 0;
  for (int k = 0; k < trials; ++k) {
    const Scenario s = random_scenario(rng);
    try {
      const SolveReport r = optimal_operator_solution(s);
      if (!report_checks(s, r, why)) ++ic_fail;
      const SolveReport ndp = solve_ndp(s, 200);
      if (ndp.operator_profit > r.operator_profit + 1e-9 * scale_of(r.operator_profit)) ++ndp_fail;
      const SolveReport njo = solve_njo(s);
      if (r.server_cost > njo.server_cost + 1e-9 * scale_of(njo.server_cost)) ++njo_fail;
      const HorizontalVerdict v = check_horizontal_equilibrium(s);
      if ((v.h.value >= 0.0) != v.mutual_best_response) ++h_fail;
    } catch (const std::exception&) {
      ++errors;
    }
  }
  const std::string of = " of " + std::to_string(trials);
  tally.record("random: vertical report properties", ic_fail == 0, std::to_string(ic_fail) + of + " failed");
  tally.record("random: IJD profit >= NDP profit", ndp_fail == 0, std::to_string(ndp_fail) + of + " failed");
  tally.record("random: IJD server cost <= NJO server cost", njo_fail == 0, std::to_string(njo_fail) + of + " failed");
  tally.record("random: sign(H) matches mutual best response", h_fail == 0, std::to_string(h_fail) + of + " failed");
  tally.record("random: no solver errors", errors == 0, std::to_string(errors) + of + " threw");
  return tally.failures;
}

}  // namespace fedprice::tools
