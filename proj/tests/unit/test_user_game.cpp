#include <doctest.h>

#include <random>

#include "fedprice/operator_pricing.hpp"
#include "fedprice/random_scenario.hpp"
#include "fedprice/user_game.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fedprice;

TEST_CASE("dynamics: a lone user with a profitable item joins") {
  const Scenario s = fixture::make({0.0}, {1.0}, {1}, 1.0);
  const Contract c{{{1.0, 4.0}}};  // 4 - 1 - 1 - 1 = 1 at price 1
  const DynamicsResult r = best_response_dynamics(s, c, {{1.0}}, 7, 10);
  CHECK(r.converged);
  REQUIRE(r.assignment.participants() == 1);
  CHECK(*r.assignment.choices[0].slot == 0);
}

TEST_CASE("dynamics: two identical users spread over symmetric slots") {
  const Scenario s = fixture::make({0.0, 0.0}, {1.0}, {2}, 1.0);
  const Contract c{{{1.0, 10.0}}};
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const DynamicsResult r = best_response_dynamics(s, c, {{1.0, 1.0}}, seed, 20);
    CHECK(r.converged);
    CHECK(r.assignment.demand(2).counts == std::vector<double>{1.0, 1.0});
    CHECK(max_deviation_gain(s, c, {{1.0, 1.0}}, r.assignment) <= kDeviationTolerance);
  }
}

TEST_CASE("dynamics are reproducible for a seed") {
  std::mt19937_64 rng(11);
  const Scenario s = random_scenario(rng, {3, 3, 4, false});
  const SolveReport v = optimal_operator_solution(s);
  const DynamicsResult a = best_response_dynamics(s, v.contract, v.prices, 5, 50);
  const DynamicsResult b = best_response_dynamics(s, v.contract, v.prices, 5, 50);
  CHECK(a.rounds == b.rounds);
  CHECK(a.assignment.demand(s.num_slots()).counts == b.assignment.demand(s.num_slots()).counts);
}

TEST_CASE("equal-cost verification") {
  SUBCASE("cheap slot used, expensive empty slot") {
    const Scenario s = fixture::make({0.0, 10.0}, {1.0}, {1}, 1.0);
    CHECK(verify_equal_cost_equilibrium(s, {{0.0, 0.0}}, {{1.0, 0.0}}));
  }
  SUBCASE("selected slots differ by 1 with slack 0.1") {
    const Scenario s = fixture::make({0.0, 0.0}, {1.0}, {2}, 1.0);
    CHECK_FALSE(verify_equal_cost_equilibrium(s, {{0.0, 1.0}}, {{1.0, 1.0}}, 0.1));
    CHECK(verify_equal_cost_equilibrium(s, {{0.0, 1.0}}, {{1.0, 1.0}}, 1.0));
  }
  SUBCASE("an empty slot that undercuts fails") {
    const Scenario s = fixture::make({0.0, 0.0}, {1.0}, {1}, 1.0);
    CHECK_FALSE(verify_equal_cost_equilibrium(s, {{5.0, 0.0}}, {{1.0, 0.0}}));
  }
  SUBCASE("operator prices with continuous demand") {
    const Scenario s = fixture::make({0.0, 1.0, 3.0}, {1.0, 2.0}, {2, 2}, 0.5, 0.3, 0.05, 5.0, 40.0);
    const SolveReport r = optimal_operator_solution(s);
    REQUIRE(r.threshold > 0);
    CHECK(verify_equal_cost_equilibrium(s, r.prices, r.demand));
  }
  SUBCASE("no participants") {
    const Scenario s = fixture::make({0.0}, {1.0}, {1});
    CHECK_THROWS_AS(verify_equal_cost_equilibrium(s, {{1.0}}, {{0.0}}), InputError);
  }
}

TEST_CASE("common network cost") {
  Scenario s = fixture::make({0.0}, {1.0}, {1}, 1.0);
  CHECK(common_network_cost(s, {{5.0}}, {{1.0}}) == doctest::Approx(6.0));
  s = fixture::make({2.0, 0.0, 1.0}, {1.0}, {1}, 0.0);
  CHECK(common_network_cost(s, {{4.0, 3.0, 7.0}}, {{1.0, 2.0, 0.0}}) == 3.0);
}

TEST_CASE("contract item choice") {
  const Scenario s = fixture::make({0.0}, {1.0, 3.0}, {1, 1});
  SUBCASE("exhaustive payoffs") {
    // Type theta=1: item 0 gives 10-2-2=6, item 1 gives 4-1-2=1.
    // Type theta=3: item 0 gives 10-6-2=2, item 1 gives 4-3-2=-1.
    const Contract c{{{2.0, 10.0}, {1.0, 4.0}}};
    const auto picks = contract_item_choice(s, c, 2.0);
    REQUIRE(picks[0].item);
    CHECK(*picks[0].item == 0);
    CHECK(picks[0].payoff == doctest::Approx(6.0));
    REQUIRE(picks[1].item);
    CHECK(*picks[1].item == 0);
    CHECK(picks[1].payoff == doctest::Approx(2.0));
    // Past c = 4 the second type has nothing left and opts out.
    CHECK(contract_item_choice(s, c, 4.0)[1].item);
    CHECK_FALSE(contract_item_choice(s, c, 4.0 + 1e-9)[1].item);
  }
  SUBCASE("zero items") {
    for (const ItemChoice& p : contract_item_choice(s, Contract::zeros(2), 0.0)) CHECK_FALSE(p.item);
  }
  SUBCASE("ties go to the own item") {
    const Contract c{{{1.0, 5.0}, {1.0, 5.0}}};
    const auto picks = contract_item_choice(s, c, 0.0);
    CHECK(*picks[0].item == 0);
    CHECK(*picks[1].item == 1);
  }
  SUBCASE("designed contracts are chosen item by item") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
      const Scenario r = random_scenario(rng);
      const SolveReport v = optimal_operator_solution(r);
      const auto picks = contract_item_choice(r, v.contract, v.common_cost);
      for (std::size_t j = 0; j < r.num_types(); ++j) {
        if (j < v.threshold) {
          REQUIRE(picks[j].item);
          CHECK(*picks[j].item == j);
        } else {
          CHECK_FALSE(picks[j].item);
        }
      }
    }
  }
}

TEST_CASE("surplus budget") {
  CHECK_FALSE(surplus_budget(Contract::zeros(3), 1.0));
  CHECK(*surplus_budget(Contract{{{2.0, 10.0}, {1.0, 4.0}}}, 3.0) == doctest::Approx(4.0));
}

TEST_CASE("slot equilibrium matches the bisection oracle") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const Scenario s = random_scenario(rng, {3, 5, 4, false});
    std::uniform_real_distribution<double> price(0.0, s.price_cap);
    PriceSchedule p;
    for (std::size_t t = 0; t < s.num_slots(); ++t) p.prices.push_back(price(rng));
    const double users = s.total_users();
    const SlotEquilibrium eq = slot_equilibrium(s, p, users);
    const oracle::Split o = oracle::slot_split(s, p.prices, users);
    CHECK(eq.cost == doctest::Approx(o.cost).epsilon(1e-9));
    for (std::size_t t = 0; t < s.num_slots(); ++t) {
      CHECK(eq.demand.counts[t] == doctest::Approx(o.counts[t]).epsilon(1e-7).scale(1.0));
    }
    CHECK(eq.demand.total() == doctest::Approx(users).epsilon(1e-12));
  }
}

TEST_CASE("slot equilibrium without congestion fills the cheapest slots") {
  const Scenario s = fixture::make({1.0, 3.0, 0.0}, {1.0}, {4}, 0.0);
  const SlotEquilibrium eq = slot_equilibrium(s, {{2.0, 2.0, 5.0}}, 4.0);
  CHECK(eq.cost == 2.0);
  CHECK(eq.demand.counts[0] == doctest::Approx(3.0));
  CHECK(eq.demand.counts[1] == doctest::Approx(1.0));
  CHECK(eq.demand.counts[2] == 0.0);
}

TEST_CASE("integer slack and deviation gains") {
  const Scenario s = fixture::make({1.0, 4.0}, {1.0}, {3}, 0.5);
  CHECK(integer_slack(s, {{3.0, 0.0}}) == doctest::Approx(0.5 * (2 * 4.0 + 1)));

  const Contract c{{{1.0, 30.0}}};
  const UserAssignment a = assignment_from_counts(s, {std::size_t{0}}, {{3.0, 0.0}, true});
  CHECK(a.participants() == 3);
  // Slot 0 costs 0.5*16 = 8 per user; moving to slot 1 costs 0.5*25 = 12.5.
  CHECK(max_deviation_gain(s, c, {{0.0, 0.0}}, a) == doctest::Approx(0.0));
  // With slot 1 free of charge and slot 0 expensive, moving gains 8 + 10 - 12.5.
  CHECK(max_deviation_gain(s, c, {{10.0, 0.0}}, a) == doctest::Approx(5.5));
  CHECK_THROWS_AS(assignment_from_counts(s, {std::size_t{0}}, {{2.0, 0.0}, true}), InputError);
}
