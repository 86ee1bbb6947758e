#include "fedprice/operator_pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fedprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool approx_equal(double a, double b) {
  return std::fabs(a - b) <= 1e-15 * std::max(std::fabs(a), std::fabs(b));
}

// n_t(lambda) on a selected slot, written as -(key + lambda) / (sqrt(.) + 2 beta h + gamma)
// to avoid the cancellation in the textbook root formula.
double kkt_count(const Scenario& s, std::size_t t, double lambda) {
  const double beta = s.congestion;
  const double gamma = s.operator_cost;
  const double h = s.background[t];
  const double disc = (beta * h - gamma) * (beta * h - gamma) - 3.0 * beta * lambda;
  return -(slot_key(s, t) + lambda) / (std::sqrt(std::max(0.0, disc)) + 2.0 * beta * h + gamma);
}

double congestion_burden(const Scenario& s, const DemandDistribution& demand) {
  double users_cost = 0.0;
  double network_cost = 0.0;
  for (std::size_t t = 0; t < s.num_slots(); ++t) {
    const double n = demand.counts[t];
    const double load = n + s.background[t];
    users_cost += n * load * load;
    network_cost += load * load;
  }
  return s.congestion * users_cost + s.operator_cost * network_cost;
}

}  // namespace

double slot_key(const Scenario& scenario, std::size_t t) {
  const double h = scenario.background.at(t);
  return h * (scenario.congestion * h + 2.0 * scenario.operator_cost);
}

KktSolution optimal_demand_distribution(const Scenario& scenario, double users) {
  if (!(users > 0.0)) throw InputError("optimal_demand_distribution needs users > 0");
  if (!(scenario.congestion > 0.0)) {
    throw InputError("optimal_demand_distribution needs beta > 0; use water_filling");
  }
  const std::size_t T = scenario.num_slots();
  std::vector<std::size_t> order(T);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> key(T);
  for (std::size_t t = 0; t < T; ++t) key[t] = slot_key(scenario, t);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  std::vector<KktSolution> passing;
  std::ostringstream diag;
  std::size_t end = 0;
  while (end < T) {
    // Extend the prefix by one group of equal keys.
    const double group_key = key[order[end]];
    while (end < T && approx_equal(key[order[end]], group_key)) ++end;
    const std::vector<std::size_t> prefix(order.begin(), order.begin() + static_cast<long>(end));
    const double next_key = end < T ? key[order[end]] : kInf;

    auto mass = [&](double lambda) {
      double total = 0.0;
      for (std::size_t t : prefix) total += kkt_count(scenario, t, lambda);
      return total - users;
    };
    // At lambda = -group_key the last group is empty; more users need smaller lambda.
    double hi = -group_key;
    if (mass(hi) >= 0.0) {
      diag << " prefix " << end << ": mass already reached at boundary;";
      continue;
    }
    double step = std::max(1.0, std::fabs(hi));
    double lo = hi - step;
    while (mass(lo) < 0.0) {
      step *= 2.0;
      lo = hi - step;
      if (!std::isfinite(lo)) throw NumericalInfeasibility("lambda bracket diverged");
    }
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (mass(mid) > 0.0 ? lo : hi) = mid;
    }
    const double lambda = std::fabs(mass(lo)) < std::fabs(mass(hi)) ? lo : hi;

    KktSolution sol;
    sol.lambda = lambda;
    sol.demand = DemandDistribution::empty(T);
    bool positive = true;
    for (std::size_t t : prefix) {
      sol.demand.counts[t] = kkt_count(scenario, t, lambda);
      positive = positive && sol.demand.counts[t] > 0.0;
    }
    sol.selected = prefix;
    std::sort(sol.selected.begin(), sol.selected.end());
    sol.residual = sol.demand.total() - users;

    const double tol = 1e-9 * std::max(1.0, std::fabs(lambda));
    const bool sandwich = group_key <= -lambda + tol && -lambda <= next_key + tol;
    if (sandwich && positive) {
      passing.push_back(std::move(sol));
    } else {
      diag << " prefix " << end << ": lambda " << lambda << " outside key sandwich;";
    }
  }

  if (passing.empty()) {
    throw NumericalInfeasibility("no slot prefix satisfies the KKT conditions:" + diag.str());
  }
  // Convexity makes the qualifying prefix unique; with ties from rounding keep
  // the cheapest plan.
  auto cheaper = [&](const KktSolution& a, const KktSolution& b) {
    return congestion_burden(scenario, a.demand) < congestion_burden(scenario, b.demand);
  };
  return *std::min_element(passing.begin(), passing.end(), cheaper);
}

WaterFillingSolution water_filling(const Scenario& scenario, double users) {
  if (scenario.congestion != 0.0) throw InputError("water_filling needs beta == 0");
  if (!(users >= 0.0)) throw InputError("users must be nonnegative");
  const auto& h = scenario.background;
  const std::size_t T = h.size();
  WaterFillingSolution out;
  out.demand = DemandDistribution::empty(T);
  const double hmin = *std::min_element(h.begin(), h.end());
  if (users == 0.0) {
    out.level = hmin;
    out.price = scenario.price_cap;
    return out;
  }

  auto filled = [&](double v) {
    double total = 0.0;
    for (double ht : h) total += std::max(0.0, v - ht);
    return total;
  };
  double lo = hmin;
  double hi = *std::max_element(h.begin(), h.end()) + users;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (filled(mid) < users ? lo : hi) = mid;
  }
  // The map is linear on the active set, so solve it exactly there.
  double sum_h = 0.0;
  std::size_t active = 0;
  for (double ht : h) {
    if (ht < hi) {
      sum_h += ht;
      ++active;
    }
  }
  out.level = (users + sum_h) / static_cast<double>(active);
  for (std::size_t t = 0; t < T; ++t) out.demand.counts[t] = std::max(0.0, out.level - h[t]);
  out.price = std::min(scenario.price_cap, cost_band(scenario, out.demand).upper());
  return out;
}

DemandDistribution planned_demand(const Scenario& scenario, double users) {
  if (users == 0.0) return DemandDistribution::empty(scenario.num_slots());
  if (scenario.congestion == 0.0) return water_filling(scenario, users).demand;
  return optimal_demand_distribution(scenario, users).demand;
}

double CostBand::upper() const { return std::min(upper_selected, upper_unselected); }

CostBand cost_band(const Scenario& scenario, const DemandDistribution& demand) {
  CostBand band{0.0, kInf, kInf};
  const double beta = scenario.congestion;
  bool any = false;
  for (std::size_t t = 0; t < scenario.num_slots(); ++t) {
    const double h = scenario.background[t];
    if (demand.counts[t] > 0.0) {
      const double load = demand.counts[t] + h;
      band.lower = std::max(band.lower, beta * load * load);
      band.upper_selected = std::min(band.upper_selected, scenario.price_cap + beta * load * load);
      any = true;
    } else {
      band.upper_unselected = std::min(band.upper_unselected, scenario.price_cap + beta * h * h);
    }
  }
  if (!any) band.upper_selected = scenario.price_cap;
  return band;
}

PriceSchedule prices_for_cost(const Scenario& scenario, const DemandDistribution& demand,
                              double c) {
  PriceSchedule p = PriceSchedule::uniform(scenario.num_slots(), scenario.price_cap);
  for (std::size_t t = 0; t < scenario.num_slots(); ++t) {
    if (!(demand.counts[t] > 0.0)) continue;
    const double load = demand.counts[t] + scenario.background[t];
    p.prices[t] = std::clamp(c - scenario.congestion * load * load, 0.0, scenario.price_cap);
  }
  return p;
}

double planned_profit(const Scenario& scenario, const DemandDistribution& demand, double c) {
  return demand.total() * c - congestion_burden(scenario, demand);
}

std::optional<DemandDistribution> floor_split(const Scenario& scenario, double users, double floor,
                                              double ceiling) {
  const std::size_t T = scenario.num_slots();
  const double beta = scenario.congestion;
  const double gamma = scenario.operator_cost;
  const auto& h = scenario.background;
  std::vector<double> lb(T), ub(T);
  double sum_lb = 0.0, sum_ub = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    lb[t] = std::max(0.0, floor - h[t]);
    ub[t] = h[t] < ceiling ? std::min(ceiling - h[t], users) : 0.0;
    if (lb[t] > ub[t]) return std::nullopt;
    sum_lb += lb[t];
    sum_ub += ub[t];
  }
  if (sum_lb > users * (1.0 + 1e-12) || sum_ub < users * (1.0 - 1e-12)) return std::nullopt;

  // Marginal cost of the n-th user in slot t and its inverse, clamped to the box.
  auto marginal = [&](std::size_t t, double n) {
    return beta * (3.0 * n * n + 4.0 * n * h[t] + h[t] * h[t]) + 2.0 * gamma * (n + h[t]);
  };
  auto count = [&](std::size_t t, double mu) {
    const double disc = (beta * h[t] - gamma) * (beta * h[t] - gamma) + 3.0 * beta * mu;
    const double n = (mu - slot_key(scenario, t)) / (std::sqrt(std::max(0.0, disc)) + 2.0 * beta * h[t] + gamma);
    return std::clamp(n, lb[t], ub[t]);
  };
  double lo = kInf, hi = -kInf;
  for (std::size_t t = 0; t < T; ++t) {
    lo = std::min(lo, marginal(t, lb[t]) - 1.0);
    hi = std::max(hi, marginal(t, ub[t]) + 1.0);
  }
  auto total = [&](double mu) {
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) sum += count(t, mu);
    return sum;
  };
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (total(mid) < users ? lo : hi) = mid;
  }
  DemandDistribution d = DemandDistribution::empty(T);
  for (std::size_t t = 0; t < T; ++t) d.counts[t] = count(t, hi);
  // Rounding leaves specks in slots that sit exactly at the floor; fold them
  // into the fullest slot so those slots stay unselected.
  const std::size_t fullest = static_cast<std::size_t>(
      std::max_element(d.counts.begin(), d.counts.end()) - d.counts.begin());
  for (std::size_t t = 0; t < T; ++t) {
    if (t != fullest && lb[t] == 0.0 && d.counts[t] < 1e-12 * std::max(1.0, users)) {
      d.counts[fullest] += d.counts[t];
      d.counts[t] = 0.0;
    }
  }
  return d;
}

namespace {

PricingPlan price_plan(const Scenario& s, DemandDistribution demand, double c_max, double c_min,
                       bool strict_min) {
  PricingPlan plan;
  const CostBand band = cost_band(s, demand);
  plan.common_cost = std::min(c_max, band.upper());
  const double tol = 1e-12 * std::max(1.0, std::fabs(plan.common_cost));
  plan.feasible = std::isfinite(plan.common_cost) && plan.common_cost >= band.lower - tol &&
                  (strict_min ? plan.common_cost > c_min : plan.common_cost >= c_min - tol);
  plan.profit = plan.feasible ? planned_profit(s, demand, plan.common_cost) : -kInf;
  plan.demand = std::move(demand);
  return plan;
}

double water_level(const std::vector<double>& h, double users) {
  std::vector<double> sorted = h;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  double level = sorted.front();
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    sum += sorted[k];
    level = (users + sum) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || level <= sorted[k + 1]) break;
  }
  return level;
}

}  // namespace

PricingPlan best_plan(const Scenario& scenario, double users, double c_max, double c_min,
                      bool strict_min) {
  PricingPlan base = price_plan(scenario, planned_demand(scenario, users), c_max, c_min, strict_min);
  const double beta = scenario.congestion;
  if (users == 0.0 || beta == 0.0) return base;
  if (base.feasible && c_max <= cost_band(scenario, base.demand).upper()) return base;

  const double p0 = scenario.price_cap;
  const auto& h = scenario.background;
  const double lo = *std::min_element(h.begin(), h.end());
  double top = water_level(h, users);
  if (std::isfinite(c_max)) top = std::min(top, std::sqrt(std::max(0.0, (c_max - p0) / beta)));
  if (!(top > lo)) return base;

  auto plan_at = [&](double floor) {
    const double cap = std::min(c_max, p0 + beta * floor * floor);
    const auto d = floor_split(scenario, users, floor, std::sqrt(std::max(0.0, cap) / beta));
    if (!d) return PricingPlan{};
    return price_plan(scenario, *d, c_max, c_min, strict_min);
  };
  auto value = [&](double floor) {
    const PricingPlan p = plan_at(floor);
    return p.feasible ? p.profit : -kInf;
  };

  constexpr int kGrid = 64;
  double best_floor = top;
  double best_value = value(top);
  int best_k = kGrid;
  for (int k = 0; k < kGrid; ++k) {
    const double f = lo + (top - lo) * k / kGrid;
    const double v = value(f);
    if (v > best_value) {
      best_value = v;
      best_floor = f;
      best_k = k;
    }
  }
  // Golden-section refinement inside the neighbouring grid cells.
  double a = lo + (top - lo) * std::max(0, best_k - 1) / kGrid;
  double b = lo + (top - lo) * std::min(kGrid, best_k + 1) / kGrid;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = value(x1), f2 = value(x2);
  while (b - a > 1e-13 * std::max(1.0, top)) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = value(x1);
    }
  }
  if (f1 > best_value) {
    best_value = f1;
    best_floor = x1;
  }
  if (f2 > best_value) {
    best_value = f2;
    best_floor = x2;
  }

  PricingPlan raised = plan_at(best_floor);
  if (!raised.feasible) return base;
  if (base.feasible && base.profit >= raised.profit - 1e-12 * std::max(1.0, std::fabs(raised.profit))) return base;
  raised.floor_raised = true;
  return raised;
}

std::vector<OperatorCandidate> operator_candidates(const Scenario& scenario) {
  const ServerCostLines lines = ServerCostLines::build(scenario);
  std::vector<OperatorCandidate> out;
  for (std::size_t x = 1; x <= scenario.num_types(); ++x) {
    OperatorCandidate cand;
    cand.threshold = x;
    cand.server_upper = lines.upper_preference(x);
    cand.server_lower = lines.lower_preference(x);
    const PricingPlan plan = best_plan(scenario, scenario.users_up_to(x), cand.server_upper, cand.server_lower);
    cand.demand = plan.demand;
    cand.band = cost_band(scenario, cand.demand);
    cand.max_cost = plan.common_cost;
    cand.feasible = lines.feasible(x) && plan.feasible;
    cand.profit = cand.feasible ? plan.profit : -kInf;
    out.push_back(std::move(cand));
  }
  return out;
}

void fill_payoffs(const Scenario& scenario, SolveReport& report) {
  const std::size_t J = scenario.num_types();
  report.user_payoffs.assign(J, 0.0);
  report.choices.assign(J, std::nullopt);
  for (std::size_t j = 0; j < report.threshold && j < J; ++j) {
    const ContractItem& it = report.contract.items[j];
    report.user_payoffs[j] = it.reward - scenario.types[j].theta * it.data - report.common_cost;
    report.choices[j] = j;
  }
}

SolveReport no_participation_report(const Scenario& scenario) {
  SolveReport r;
  r.contract = Contract::zeros(scenario.num_types());
  r.prices = PriceSchedule::uniform(scenario.num_slots(), scenario.price_cap);
  r.demand = DemandDistribution::empty(scenario.num_slots());
  r.threshold = 0;
  r.common_cost = kInf;
  for (std::size_t t = 0; t < scenario.num_slots(); ++t) {
    const double h = scenario.background[t];
    r.common_cost = std::min(r.common_cost, scenario.price_cap + scenario.congestion * h * h);
  }
  r.server_cost = kInfiniteCost;
  r.operator_profit = operator_profit(scenario, r.prices, r.demand);
  fill_payoffs(scenario, r);
  return r;
}

SolveReport optimal_operator_solution(const Scenario& scenario) {
  scenario.validate();
  const std::vector<OperatorCandidate> cands = operator_candidates(scenario);
  const OperatorCandidate* best = nullptr;
  for (const OperatorCandidate& c : cands) {
    if (!c.feasible) continue;
    const double tol = 1e-12 * std::max(1.0, std::fabs(c.profit));
    if (!best || c.profit >= best->profit - tol) best = &c;
  }
  if (!best) return no_participation_report(scenario);

  SolveReport r;
  r.demand = best->demand;
  r.prices = prices_for_cost(scenario, best->demand, best->max_cost);
  r.common_cost = best->max_cost;
  const ContractSolution cs = optimal_contract(scenario, best->max_cost, best->threshold);
  if (cs.threshold != best->threshold) {
    throw NumericalInfeasibility("server response does not keep the operator's threshold");
  }
  r.contract = cs.contract;
  r.threshold = cs.threshold;
  r.server_cost = cs.server_cost;
  r.operator_profit = operator_profit(scenario, r.prices, r.demand);
  fill_payoffs(scenario, r);
  return r;
}

DemandDistribution round_largest_remainder(const DemandDistribution& demand, long total) {
  const std::size_t T = demand.counts.size();
  if (std::fabs(demand.total() - static_cast<double>(total)) > 1e-6 * std::max(1.0, demand.total())) {
    throw InputError("rounding target does not match demand total");
  }
  DemandDistribution out{std::vector<double>(T, 0.0), true};
  std::vector<std::pair<double, std::size_t>> frac;
  long assigned = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const double n = std::max(0.0, demand.counts[t]);
    const double base = std::floor(n);
    out.counts[t] = base;
    assigned += static_cast<long>(base);
    frac.emplace_back(n - base, t);
  }
  std::stable_sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < frac.size(); ++k, ++assigned) {
    out.counts[frac[k].second] += 1.0;
  }
  return out;
}

}  // namespace fedprice
