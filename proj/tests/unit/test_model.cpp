#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fedprice/model.hpp"
#include "fixtures.hpp"

using namespace fedprice;

namespace {

// Straight transcription of the payoff formulas, for cross-checks.
double payoff_by_hand(double r, double theta, double d, double p, double beta, double n, double h) {
  return r - theta * d - p - beta * (n + h) * (n + h);
}

}  // namespace

TEST_CASE("user payoff") {
  Scenario s = fixture::make({0.0}, {1.0}, {1}, 1.0);
  CHECK(user_payoff(s, {2.0, 10.0}, 1.0, 0, {{1.0}}, {{3.0}}) == doctest::Approx(4.0));

  s.congestion = 0.0;
  CHECK(user_payoff(s, {5.0, 5.0}, 1.0, 0, {{1.0}}, {{0.0}}) == 0.0);

  s = fixture::make({1.0}, {1.0}, {1}, 1.0);
  const double v = user_payoff(s, {4.0, 9.0}, 1.0, 0, {{1.0}}, {{3.0}});
  CHECK(v == doctest::Approx(-2.0));
  CHECK(v == doctest::Approx(payoff_by_hand(9, 1, 4, 3, 1, 1, 1)));

  CHECK_THROWS_AS(user_payoff(s, {4.0, 9.0}, 1.0, 1, {{1.0}}, {{3.0}}), InputError);
}

TEST_CASE("server cost") {
  Scenario s = fixture::make({0.0}, {1.0}, {1}, 1.0, 1.0, 1.0);
  CHECK(server_cost(s, Contract{{{4.0, 0.0}}}) == doctest::Approx(0.5));

  s = fixture::make({0.0}, {1.0}, {2}, 1.0, 1.0, 0.5);
  CHECK(server_cost(s, Contract{{{0.5, 3.5}}}) == doctest::Approx(1.0 / std::sqrt(2 * 0.5) + 0.5 * 2 * 3.5));

  s = fixture::make({0.0}, {1.0, 2.0}, {1, 1});
  CHECK(server_cost(s, Contract::zeros(2)) == kInfiniteCost);

  // Realized choices: type 1 takes item 0, type 0 opts out.
  const Contract c{{{2.0, 5.0}, {1.0, 3.0}}};
  CHECK(server_cost(s, c, {std::nullopt, std::size_t{0}}) == doctest::Approx(1.0 / std::sqrt(2.0) + 5.0));
}

TEST_CASE("operator profit") {
  Scenario s = fixture::make({0.0}, {1.0}, {1});
  CHECK(operator_profit(s, {{5.0}}, {{2.0}}) == doctest::Approx(6.0));

  s = fixture::make({1.0, 1.0}, {1.0}, {1});
  CHECK(operator_profit(s, {{7.0, 9.0}}, DemandDistribution::empty(2)) == doctest::Approx(-2.0));

  s = fixture::make({0.0, 1.0}, {1.0}, {1}, 1.0, 0.5);
  CHECK(operator_profit(s, {{3.0, 3.0}}, {{1.0, 1.0}}) == doctest::Approx(3.5));

  CHECK_THROWS_AS(operator_profit(s, {{3.0}}, {{1.0, 1.0}}), InputError);
}

TEST_CASE("network cost of a slot") {
  Scenario s = fixture::make({0.0}, {1.0}, {1}, 1.0);
  CHECK(network_cost_of_slot(s, {{5.0}}, {{1.0}}, 0) == doctest::Approx(6.0));

  s.congestion = 0.0;
  CHECK(network_cost_of_slot(s, {{5.0}}, {{3.0}}, 0) == 5.0);

  s = fixture::make({1.0}, {1.0}, {1}, 2.0);
  CHECK(network_cost_of_slot(s, {{2.0}}, {{3.0}}, 0) == doctest::Approx(34.0));
  CHECK_THROWS_AS(network_cost_of_slot(s, {{2.0}}, {{3.0}}, 4), InputError);
}

TEST_CASE("payoff functions are pure") {
  const Scenario s = fixture::make({0.3, 1.7}, {1.1, 2.9}, {2, 3}, 0.37, 0.21, 0.13);
  const Contract c{{{3.3, 9.1}, {1.2, 4.4}}};
  const PriceSchedule p{{2.2, 0.7}};
  const DemandDistribution d{{1.5, 3.5}};
  auto same = [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; };
  CHECK(same(server_cost(s, c), server_cost(s, c)));
  CHECK(same(operator_profit(s, p, d), operator_profit(s, p, d)));
  CHECK(same(network_cost_of_slot(s, p, d, 1), network_cost_of_slot(s, p, d, 1)));
  CHECK(same(user_payoff(s, c.items[0], 1.1, 0, d, p), user_payoff(s, c.items[0], 1.1, 0, d, p)));
}

TEST_CASE("scenario validation names the field") {
  Scenario s = fixture::make({0.0}, {3.0, 3.0}, {1, 1});
  try {
    s.validate();
    FAIL("expected a validation error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()) == "user_types.theta not strictly increasing");
  }
  s = fixture::make({-1.0}, {1.0}, {1});
  CHECK_THROWS_AS(s.validate(), InputError);
  s = fixture::make({1.0}, {1.0}, {1}, -0.1);
  CHECK_THROWS_AS(s.validate(), InputError);
  s = fixture::make({}, {1.0}, {1});
  CHECK_THROWS_AS(s.validate(), InputError);
}

TEST_CASE("demand bookkeeping") {
  const DemandDistribution d{{0.0, 2.5, 0.0, 1.0}};
  CHECK(d.total() == 3.5);
  CHECK(d.selected_slots() == std::vector<std::size_t>{1, 3});
  CHECK(d.unselected_slots() == std::vector<std::size_t>{0, 2});
}
