#include <doctest.h>

#include <cmath>
#include <random>

#include "fedprice/benchmarks.hpp"
#include "fedprice/operator_pricing.hpp"
#include "fedprice/random_scenario.hpp"
#include "fedprice/scenario_io.hpp"
#include "fixtures.hpp"

using namespace fedprice;

namespace {

double tol(double v) { return 1e-9 * std::max(1.0, std::fabs(v)); }

}  // namespace

TEST_CASE("percent change") {
  CHECK(percent_change(80.0, 100.0) == doctest::Approx(-20.0));
  CHECK(percent_change(-50.0, -100.0) == doctest::Approx(50.0));
  CHECK(percent_change(3.0, 3.0) == 0.0);
  CHECK(percent_change(1.0, kInfiniteCost) == -100.0);
  CHECK(percent_change(1.0, 0.0) == kInfiniteCost);
  CHECK(percent_change(-1.0, 0.0) == -kInfiniteCost);
}

TEST_CASE("one slot: uniform pricing is dynamic pricing") {
  const Scenario s = fixture::make({1.0}, {1.0, 2.0}, {2, 3}, 0.4, 0.3, 0.05, 5.0, 30.0);
  const SolveReport ijd = optimal_operator_solution(s);
  const SolveReport ndp = solve_ndp(s);
  CHECK(ndp.operator_profit == doctest::Approx(ijd.operator_profit).epsilon(1e-9));
  CHECK(ndp.server_cost == doctest::Approx(ijd.server_cost).epsilon(1e-9));
  CHECK(ndp.total_user_payoff(s) == doctest::Approx(ijd.total_user_payoff(s)).epsilon(1e-9).scale(1.0));

  const Comparison c = compare_mechanisms(s);
  const Table t = comparison_table(s, c);
  const std::size_t ndp_row = 2;
  REQUIRE(t.rows[ndp_row][t.column("mechanism")] == "NDP");
  CHECK(std::fabs(t.number(ndp_row, "ijd_profit_growth_pct")) <= 1e-6);
  CHECK(std::fabs(t.number(ndp_row, "ijd_server_cost_reduction_pct")) <= 1e-6);
  CHECK(std::fabs(t.number(ndp_row, "ijd_user_payoff_growth_pct")) <= 1e-6);
}

TEST_CASE("flat background without congestion: uniform pricing loses nothing") {
  const Scenario s = fixture::make({2.0, 2.0, 2.0}, {1.0, 2.0}, {3, 3}, 0.0, 0.2, 0.05, 5.0, 25.0);
  const SolveReport ijd = optimal_operator_solution(s);
  const SolveReport ndp = solve_ndp(s);
  CHECK(ndp.operator_profit == doctest::Approx(ijd.operator_profit).epsilon(1e-9));
}

TEST_CASE("free network: NJO is IJD") {
  const Scenario s = fixture::make({0.0, 1.0}, {1.0, 2.0}, {2, 2}, 0.0, 0.2, 0.05, 5.0, 0.0);
  const SolveReport ijd = optimal_operator_solution(s);
  REQUIRE(ijd.common_cost == 0.0);
  const SolveReport njo = solve_njo(s);
  CHECK(njo.threshold == ijd.threshold);
  CHECK(njo.server_cost == doctest::Approx(ijd.server_cost).epsilon(1e-12));
  CHECK(njo.operator_profit == doctest::Approx(ijd.operator_profit).epsilon(1e-12));
  CHECK(njo.total_user_payoff(s) == doctest::Approx(ijd.total_user_payoff(s)).epsilon(1e-12));
}

TEST_CASE("random instances: IJD dominates the benchmarks") {
  std::mt19937_64 rng(123);
  for (int k = 0; k < 30; ++k) {
    const Scenario s = random_scenario(rng);
    const SolveReport ijd = optimal_operator_solution(s);
    const SolveReport ndp = solve_ndp(s, 300);
    const SolveReport njo = solve_njo(s);
    CHECK(ijd.operator_profit >= ndp.operator_profit - tol(ijd.operator_profit));
    CHECK(ijd.server_cost <= njo.server_cost + tol(ijd.server_cost));
  }
}

TEST_CASE("replication: IJD against NJO") {
  const Scenario s = load_scenario(fixture::replication_file());
  const SolveReport ijd = optimal_operator_solution(s);
  const SolveReport njo = solve_njo(s);
  CHECK(njo.server_cost > ijd.server_cost);
  CHECK(njo.operator_profit < ijd.operator_profit);
}

TEST_CASE("a failing mechanism does not stop the comparison") {
  Scenario s = fixture::make({0.0}, {1.0}, {1});
  s.operator_cost = -1.0;  // invalid: every mechanism rejects it
  const Comparison c = compare_mechanisms(s, "test");
  REQUIRE(c.mechanisms.size() == 3);
  for (const MechanismOutcome& m : c.mechanisms) {
    CHECK_FALSE(m.report);
    CHECK_FALSE(m.error.empty());
  }
  CHECK(c.provenance == "test");
}
