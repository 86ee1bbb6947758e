// Comparison mechanisms.
//
//   IJD  joint design: the vertical equilibrium.
//   NJO  the server designs its contract as if the network were free (c = 0);
//        the operator then prices against that contract and users respond.
//   NDP  the operator must post one price for every slot.

#ifndef FEDPRICE_BENCHMARKS_HPP
#define FEDPRICE_BENCHMARKS_HPP

#include <optional>
#include <string>
#include <vector>

#include "fedprice/model.hpp"

namespace fedprice {

SolveReport solve_njo(const Scenario& scenario);

/// Uniform-price search: a grid of `grid_points` prices over [0, p0], then
/// golden-section refinement around the best grid point.
SolveReport solve_ndp(const Scenario& scenario, int grid_points = 1000);

struct MechanismOutcome {
  std::string name;
  std::optional<SolveReport> report;
  std::string error;  // set when the solve threw
};

/// Percent change of `value` relative to `reference`; +-inf when the
/// reference is zero and the values differ, -100 / +100 when only the
/// reference is +inf / -inf.
double percent_change(double value, double reference);

struct Comparison {
  std::vector<MechanismOutcome> mechanisms;  // IJD, NJO, NDP
  std::string provenance;
};

/// Runs all three mechanisms. A failure in one is recorded and the others
/// still run.
Comparison compare_mechanisms(const Scenario& scenario, const std::string& provenance = "");

}  // namespace fedprice

#endif  // FEDPRICE_BENCHMARKS_HPP
