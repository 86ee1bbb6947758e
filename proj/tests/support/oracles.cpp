#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "fedprice/contract.hpp"

namespace oracle {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<double> least_rewards(const Scenario& s, const std::vector<double>& data,
                                  const std::vector<std::size_t>& incentivized, double c) {
  std::vector<double> r(s.num_types(), 0.0);
  const std::size_t n = incentivized.size();
  std::vector<double> best(n, -kInf);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t j = incentivized[a];
    best[a] = s.types[j].theta * data[j] + c;
  }
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const std::size_t j = incentivized[a], k = incentivized[b];
        const double cand = best[b] + s.types[j].theta * (data[j] - data[k]);
        if (cand > best[a] + 1e-15 * std::fabs(cand)) {
          best[a] = cand;
          changed = true;
        }
      }
    }
    if (!changed) break;
    if (round == n) return std::vector<double>(s.num_types(), kInf);  // positive cycle
  }
  for (std::size_t a = 0; a < n; ++a) r[incentivized[a]] = best[a];
  return r;
}

double server_cost(const Scenario& s, const std::vector<double>& data, const std::vector<double>& rewards,
                   const std::vector<std::size_t>& incentivized) {
  double volume = 0.0, paid = 0.0;
  for (std::size_t j : incentivized) {
    volume += s.types[j].count * data[j];
    paid += s.types[j].count * rewards[j];
  }
  if (volume <= 0.0) return kInf;
  return 1.0 / std::sqrt(volume) + s.reward_weight * paid;
}

GridContract grid_contract(const Scenario& s, double c, int points) {
  GridContract best;
  best.resolution = s.d_max / points;
  const std::size_t J = s.num_types();
  for (std::size_t x = 1; x <= J; ++x) {
    std::vector<std::size_t> inc(x);
    for (std::size_t j = 0; j < x; ++j) inc[j] = j;
    std::vector<int> idx(x, points);
    // Enumerate nonincreasing grid indices idx[0] >= idx[1] >= ... >= 1.
    while (true) {
      std::vector<double> d(J, 0.0);
      for (std::size_t j = 0; j < x; ++j) d[j] = s.d_max * idx[j] / points;
      const std::vector<double> r = least_rewards(s, d, inc, c);
      const double cost = server_cost(s, d, r, inc);
      if (cost < best.cost) {
        best.cost = cost;
        best.threshold = x;
        best.data = d;
      }
      std::size_t pos = x;
      while (pos > 0 && idx[pos - 1] == 1) --pos;
      if (pos == 0) break;
      --idx[pos - 1];
      for (std::size_t q = pos; q < x; ++q) idx[q] = idx[pos - 1];
    }
  }
  return best;
}

std::vector<double> kkt_demand(const Scenario& s, double users) {
  const double beta = s.congestion, gamma = s.operator_cost;
  const std::size_t T = s.num_slots();
  auto count = [&](std::size_t t, double lambda) {
    const double h = s.background[t];
    const double disc = (beta * h - gamma) * (beta * h - gamma) - 3.0 * beta * lambda;
    return std::max(0.0, (std::sqrt(std::max(0.0, disc)) - (2.0 * beta * h + gamma)) / (3.0 * beta));
  };
  auto total = [&](double lambda) {
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) sum += count(t, lambda);
    return sum;
  };
  double hi = kInf;
  for (std::size_t t = 0; t < T; ++t) {
    const double h = s.background[t];
    hi = std::min(hi, (beta * h - gamma) * (beta * h - gamma) / (3.0 * beta));
  }
  double lo = hi - 1.0;
  while (total(lo) < users) lo = hi - 2.0 * (hi - lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (total(mid) > users ? lo : hi) = mid;
  }
  std::vector<double> n(T);
  for (std::size_t t = 0; t < T; ++t) n[t] = count(t, 0.5 * (lo + hi));
  return n;
}

Split slot_split(const Scenario& s, const std::vector<double>& prices, double users) {
  const std::size_t T = s.num_slots();
  const double beta = s.congestion;
  auto counts_at = [&](double c) {
    std::vector<double> n(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      if (c > prices[t]) n[t] = std::max(0.0, std::sqrt((c - prices[t]) / beta) - s.background[t]);
    }
    return n;
  };
  auto sum = [](const std::vector<double>& v) {
    double a = 0.0;
    for (double x : v) a += x;
    return a;
  };
  double lo = 0.0, hi = 1.0;
  while (sum(counts_at(hi)) <= users) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (sum(counts_at(mid)) <= users ? lo : hi) = mid;
  }
  return Split{counts_at(hi), hi};
}

Downstream downstream(const Scenario& s, const std::vector<double>& prices) {
  const std::size_t T = s.num_slots();
  Downstream best;
  best.profit = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double h = s.background[t];
    best.profit -= s.operator_cost * h * h;
  }
  bool found = false;
  for (std::size_t x = 1; x <= s.num_types(); ++x) {
    const Split sp = slot_split(s, prices, s.users_up_to(x));
    const fedprice::ContractSolution cs = fedprice::optimal_contract(s, sp.cost, x);
    if (cs.threshold != x || !std::isfinite(cs.server_cost)) continue;
    double profit = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double load = sp.counts[t] + s.background[t];
      profit += sp.counts[t] * prices[t] - s.operator_cost * load * load;
    }
    if (!found || profit > best.profit) {
      best = Downstream{x, sp.cost, profit};
      found = true;
    }
  }
  return best;
}

GridPricing grid_pricing(const Scenario& s, int points) {
  GridPricing best;
  best.resolution = s.price_cap / (points - 1);
  const std::size_t T = s.num_slots();
  std::vector<int> idx(T, 0);
  std::vector<double> p(T);
  while (true) {
    for (std::size_t t = 0; t < T; ++t) p[t] = s.price_cap * idx[t] / (points - 1);
    const Downstream d = downstream(s, p);
    if (d.profit > best.profit) {
      best.profit = d.profit;
      best.prices = p;
    }
    std::size_t t = 0;
    while (t < T && idx[t] == points - 1) idx[t++] = 0;
    if (t == T) break;
    ++idx[t];
  }
  return best;
}

double minimize_1d(const std::function<double(double)>& f, double a, double b, int scan) {
  int best_k = 0;
  double best = f(a);
  for (int k = 1; k <= scan; ++k) {
    const double v = f(a + (b - a) * k / scan);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  double lo = a + (b - a) * std::max(0, best_k - 1) / scan;
  double hi = a + (b - a) * std::min(scan, best_k + 1) / scan;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    (f(m1) < f(m2) ? hi : lo) = (f(m1) < f(m2) ? m2 : m1);
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
