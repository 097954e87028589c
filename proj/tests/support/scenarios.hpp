#pragma once

// Canonical fixtures and randomized market scenarios.

#include <random>
#include <string>

#include "random_bids.hpp"
#include "socdispatch/dispatch.hpp"

namespace socdispatch::testing {

inline SocBid bid_a() { return {{0, 5, 10}, {10, 8}, {15, 13}, 1.0, 1.0}; }
inline SocBid bid_b() { return {{0, 5, 10}, {10, 8}, {15, 14}, 1.0, 1.0}; }

inline StorageSpec os1_spec() {
  StorageSpec s;
  s.gCmax = s.gDmax = 5;
  s.rCup = s.rCdown = s.rDup = s.rDdown = 10;
  s.eMin = 0;
  s.eMax = 10;
  s.s = 4;
  return s;
}

inline Scenario os1(SocBid bid = bid_a()) {
  Scenario sc;
  sc.name = "OS-1";
  sc.T = 2;
  sc.demand = {-1, 1};
  sc.fleet.push_back({"es1", std::move(bid), os1_spec(), std::nullopt});
  return sc;
}

/// Three intervals, two-interval windows. The first window expects demand 15
/// at t=2, beyond the cheap generator, so the storage charges at t=1; demand
/// turns out to be 2 and the energy is never sold.
inline Scenario crafted_rolling() {
  Scenario sc;
  sc.name = "crafted-rolling";
  sc.T = 3;
  sc.demand = {0, 2, 1};
  StorageSpec sp;
  sp.gCmax = sp.gDmax = 5;
  sp.rCup = sp.rCdown = sp.rDup = sp.rDdown = 5;
  sp.eMax = 10;
  sc.fleet.push_back({"es1", {{0, 10}, {4}, {6}, 1.0, 1.0}, sp, std::nullopt});
  auto [cb, cs] = make_generator(5, 10, 100);
  sc.fleet.push_back({"cheap", cb, cs, std::nullopt});
  auto [pb, ps] = make_generator(20, 10, 100);
  sc.fleet.push_back({"peaker", pb, ps, std::nullopt});
  return sc;
}

struct RandomScenarioConfig {
  std::size_t max_T = 4;
  std::size_t max_K = 3;
  std::size_t max_storages = 2;
  bool backstops = true;
  bool random_ramps = true;
};

/// EDCR storages plus a generator and a flexible load large enough to keep
/// the market feasible with nonnegative prices. Each storage's initial SoC
/// is drawn inside a segment so that it can serve as the end segment.
inline Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioConfig& cfg = {}) {
  Scenario sc;
  sc.T = pick(rng, 1, cfg.max_T);
  const std::size_t n = pick(rng, 1, cfg.max_storages);
  double storage_cap = 0.0;
  double top_price = 0.0;
  double low_price = 1e9;
  for (std::size_t i = 0; i < n; ++i) {
    StorageUnit u;
    u.id = "es" + std::to_string(i + 1);
    u.bid = random_edcr_bid(rng, pick(rng, 1, cfg.max_K));
    auto& sp = u.spec;
    const auto& E = u.bid.E;
    sp.gCmax = uniform(rng, 1.0, 5.0);
    sp.gDmax = uniform(rng, 1.0, 5.0);
    if (cfg.random_ramps) {
      sp.rCup = uniform(rng, 0.5, 1.5) * sp.gCmax;
      sp.rDup = uniform(rng, 0.5, 1.5) * sp.gDmax;
    } else {
      sp.rCup = sp.gCmax;
      sp.rDup = sp.gDmax;
    }
    sp.rCdown = sp.gCmax;
    sp.rDdown = sp.gDmax;
    sp.eMin = E.front() + uniform(rng, 0.0, 0.3) * (E[1] - E.front());
    sp.eMax = E.back() - uniform(rng, 0.0, 0.3) * (E.back() - E[E.size() - 2]);
    const std::size_t g = pick(rng, 0, u.bid.segments() - 1);
    const double lo = std::max(E[g], sp.eMin);
    const double hi = std::min(E[g + 1], sp.eMax);
    sp.s = lo + uniform(rng, 0.1, 0.9) * (hi - lo);
    u.gamma = g;
    storage_cap += std::max(sp.gCmax, sp.gDmax);
    top_price = std::max(top_price, u.bid.cD.front());
    low_price = std::min(low_price, u.bid.cC.back());
    sc.fleet.push_back(std::move(u));
  }
  const double span = storage_cap + 2.0;
  for (std::size_t t = 0; t < sc.T; ++t) sc.demand.push_back(uniform(rng, -0.8, 0.8) * span);
  if (cfg.backstops) {
    const double gen_price = uniform(rng, 0.5 * top_price, 1.3 * top_price);
    auto [gb, gs] = make_generator(gen_price, 3.0 * span, 3.0 * span * static_cast<double>(sc.T) + 1.0);
    sc.fleet.push_back({"gen", gb, gs, std::nullopt});
    const double load_value = uniform(rng, 0.2, 1.0) * std::max(low_price, 1.0);
    auto [lb, ls] = make_flexible_load(load_value, 3.0 * span, 3.0 * span * static_cast<double>(sc.T) + 1.0);
    sc.fleet.push_back({"load", lb, ls, std::nullopt});
  }
  return sc;
}

}  // namespace socdispatch::testing
