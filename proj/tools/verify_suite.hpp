// Property checks run by `fedprice verify`.

#ifndef FEDPRICE_TOOLS_VERIFY_SUITE_HPP
#define FEDPRICE_TOOLS_VERIFY_SUITE_HPP

#include <cstdint>
#include <ostream>

#include "fedprice/model.hpp"

namespace fedprice::tools {

/// Checks the given scenario, then `trials` random small instances drawn from
/// `seed`. Prints one line per check; returns the number of failures.
int run_verification(const Scenario& scenario, int trials, std::uint64_t seed, std::ostream& out);

}  // namespace fedprice::tools

#endif  // FEDPRICE_TOOLS_VERIFY_SUITE_HPP
