#include "socdispatch/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "socdispatch/error.hpp"
#include "storage_block.hpp"

namespace socdispatch {

std::size_t PriceSchedule::horizon() const {
  if (kind == Kind::uniform) return pi.size();
  return per_storage.empty() ? 0 : per_storage.front().horizon();
}

DirectionalPrices PriceSchedule::for_storage(const std::string& id) const {
  if (kind == Kind::uniform) return DirectionalPrices::uniform(pi);
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return per_storage.at(i);
  throw ContractError("price schedule has no prices for storage '" + id + "'");
}

void PriceSchedule::validate(std::size_t T) const {
  auto check = [&](const std::vector<double>& v, const std::string& what) {
    if (v.size() != T)
      throw ContractError(what + " has " + std::to_string(v.size()) + " prices, horizon is " +
                          std::to_string(T));
    for (double p : v)
      if (!std::isfinite(p)) throw ContractError(what + " contains a non-finite price");
  };
  if (kind == Kind::uniform) {
    check(pi, "uniform schedule");
    return;
  }
  if (ids.size() != per_storage.size()) throw ContractError("discriminative schedule ids and prices differ");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    check(per_storage[i].charge, "charge prices of '" + ids[i] + "'");
    check(per_storage[i].discharge, "discharge prices of '" + ids[i] + "'");
  }
}

PriceSchedule extract_lmp(const DispatchSolution& solution) {
  if (!solution.has_duals) throw ContractError("dispatch solution carries no balance duals");
  PriceSchedule p;
  p.pi = solution.lambda;
  return p;
}

DirectionalPrices tlmp(const DispatchSolution& solution, const std::string& storage_id) {
  if (!solution.has_duals) throw ContractError("dispatch solution carries no multipliers");
  const auto& d = solution.storage(storage_id);
  const std::size_t T = solution.lambda.size();
  if (d.phi.size() != T) throw ContractError("storage '" + storage_id + "' carries no multipliers");
  const auto dC = detail::ramp_price(d.muC_lo, d.muC_hi);
  const auto dD = detail::ramp_price(d.muD_lo, d.muD_hi);
  DirectionalPrices p;
  for (std::size_t t = 0; t < T; ++t) {
    p.charge.push_back(solution.lambda[t] - d.etaC * d.phi[t] - dC[t]);
    p.discharge.push_back(solution.lambda[t] - d.phi[t] / d.etaD + dD[t]);
  }
  return p;
}

PriceSchedule tlmp_schedule(const DispatchSolution& solution) {
  PriceSchedule p;
  p.kind = PriceSchedule::Kind::discriminative;
  for (const auto& d : solution.storages) {
    p.ids.push_back(d.id);
    p.per_storage.push_back(tlmp(solution, d.id));
  }
  return p;
}

double payment(const DirectionalPrices& prices, const std::vector<double>& gC,
               const std::vector<double>& gD) {
  if (gC.size() != prices.charge.size() || gD.size() != prices.discharge.size())
    throw ContractError("price horizon differs from the schedule's");
  double v = 0.0;
  for (std::size_t t = 0; t < gC.size(); ++t) v += prices.discharge[t] * gD[t] - prices.charge[t] * gC[t];
  return v;
}

double market_bid_cost(const SocBid& bid, double s, const std::vector<double>& gC,
                       const std::vector<double>& gD, std::optional<std::size_t> gamma) {
  double sumC = 0.0, sumD = 0.0;
  for (double g : gC) sumC += g;
  for (double g : gD) sumD += g;
  if (gamma) {
    const auto p = end_segment_piece(bid, s, *gamma);
    return p.alpha + p.coefC * sumC + p.coefD * sumD;
  }
  if (!is_edcr(bid).edcr) throw PreconditionError("epigraph bid cost needs an EDCR bid");
  double v = -lp::kInf;
  for (const auto& p : epigraph_pieces(bid, s)) v = std::max(v, p.alpha + p.coefC * sumC + p.coefD * sumD);
  return v;
}

SelfSchedule individual_profit_max(const SocBid& bid, const StorageSpec& spec,
                                   const DirectionalPrices& prices,
                                   std::optional<std::size_t> gamma, const lp::Tolerances& tol) {
  const std::size_t T = prices.horizon();
  if (T == 0 || prices.discharge.size() != T) throw ContractError("prices must cover a nonempty horizon");
  const StorageUnit unit{"self", bid, spec, gamma};
  const CostMode mode = gamma ? CostMode::end_segment_linear : CostMode::epigraph;

  lp::LpProblem problem;
  const auto L = detail::add_storage_block(problem, unit, T, mode, gamma);
  for (std::size_t t = 0; t < T; ++t) {
    problem.set_cost(L.gC + t, problem.variables()[L.gC + t].cost + prices.charge[t]);
    problem.set_cost(L.gD + t, problem.variables()[L.gD + t].cost - prices.discharge[t]);
  }
  const auto sol = lp::solve_lp(problem, tol);
  if (sol.status == lp::Status::infeasible)
    throw InfeasibleError("self-schedule infeasible", sol.infeasible_rows);
  if (sol.status == lp::Status::unbounded)
    throw SolverError("self-schedule LP reported unbounded", sol.iterations);

  SelfSchedule out;
  out.mode = mode;
  out.dispatch = detail::read_storage(sol, L, unit, T, mode, true);
  out.Q = -sol.objective;
  out.payment = payment(prices, out.dispatch.gC, out.dispatch.gD);
  out.bid_cost = out.dispatch.cost;
  return out;
}

LocEntry loc(const DirectionalPrices& prices, const std::vector<double>& gC,
             const std::vector<double>& gD, const SocBid& bid, const StorageSpec& spec,
             std::optional<std::size_t> gamma, const lp::Tolerances& tol) {
  if (gC.size() != prices.horizon() || gD.size() != prices.horizon())
    throw ContractError("dispatch horizon differs from the price horizon");
  const auto self = individual_profit_max(bid, spec, prices, gamma, tol);
  LocEntry e;
  e.Q = self.Q;
  e.payment = payment(prices, gC, gD);
  e.bid_cost = market_bid_cost(bid, spec.s, gC, gD, gamma);
  e.loc = e.Q - e.payment + e.bid_cost;
  e.self_schedule = self.trajectory();
  return e;
}

const LocEntry& LocReport::entry(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw ContractError("no LOC entry for storage '" + id + "'");
}

LocReport loc_audit(const Scenario& scenario, const DispatchSolution& solution,
                    const PriceSchedule& prices) {
  if (solution.storages.size() != scenario.fleet.size())
    throw ContractError("solution and scenario fleets differ");
  prices.validate(scenario.T);
  LocReport r;
  r.max_loc = -lp::kInf;
  r.min_loc = lp::kInf;
  for (std::size_t i = 0; i < scenario.fleet.size(); ++i) {
    const auto& u = scenario.fleet[i];
    const auto& d = solution.storages[i];
    const auto p = prices.for_storage(u.id);
    for (std::size_t t = 0; t < p.horizon(); ++t)
      if (p.charge[t] < 0.0 || p.discharge[t] < 0.0) r.negative_prices = true;
    auto e = loc(p, d.gC, d.gD, u.bid, u.spec, d.gamma, scenario.options.tol);
    e.id = u.id;
    r.max_loc = std::max(r.max_loc, e.loc);
    r.min_loc = std::min(r.min_loc, e.loc);
    r.entries.push_back(std::move(e));
  }
  return r;
}

KktReport kkt_residuals_individual(const SocBid& bid, const StorageSpec& spec,
                                   const DirectionalPrices& prices, const SelfSchedule& schedule) {
  if (schedule.dispatch.phi.empty()) throw ContractError("self-schedule carries no multipliers");
  const StorageUnit unit{"self", bid, spec, schedule.dispatch.gamma};
  KktReport report;
  detail::storage_kkt(unit, schedule.dispatch, prices.charge, prices.discharge, report);
  return report;
}

ProbeTable truthfulness_probe(const Scenario& scenario, const std::string& storage_id,
                              const std::vector<SocBid>& perturbations) {
  std::size_t idx = scenario.fleet.size();
  for (std::size_t i = 0; i < scenario.fleet.size(); ++i)
    if (scenario.fleet[i].id == storage_id) idx = i;
  if (idx == scenario.fleet.size()) throw ContractError("no storage '" + storage_id + "' in scenario");
  const auto& truth = scenario.fleet[idx];

  const auto base = solve_one_shot(scenario);
  ProbeTable table;
  table.prices = base.lambda;
  const auto prices = DirectionalPrices::uniform(base.lambda);

  auto evaluate = [&](ProbeRow& row, const StorageDispatch& d) {
    row.gC = d.gC;
    row.gD = d.gD;
    row.profit = payment(prices, d.gC, d.gD) - market_bid_cost(truth.bid, truth.spec.s, d.gC, d.gD, std::nullopt);
    row.evaluated = true;
  };

  ProbeRow truthful;
  truthful.label = "truthful";
  truthful.bid = truth.bid;
  evaluate(truthful, base.storages[idx]);
  table.truthful_profit = truthful.profit;
  table.rows.push_back(std::move(truthful));

  for (std::size_t k = 0; k < perturbations.size(); ++k) {
    ProbeRow row;
    row.label = "perturbed " + std::to_string(k + 1);
    row.bid = perturbations[k];
    try {
      const auto v = validate_bid(row.bid);
      if (!v.ok) {
        row.skipped_reason = v.violations.front();
      } else if (!is_edcr(row.bid).edcr) {
        row.skipped_reason = "perturbed bid is not EDCR";
      } else {
        auto sc = scenario;
        sc.fleet[idx].bid = row.bid;
        evaluate(row, solve_one_shot(sc).storages[idx]);
        table.max_gain = std::max(table.max_gain, row.profit - table.truthful_profit);
      }
    } catch (const ValidationError& e) {
      row.skipped_reason = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<SocBid> edcr_perturbations(const SocBid& bid, std::size_t count, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.7, 1.3), shift(-0.3, 0.3), spread(0.05, 0.5);
  const double top = std::max(1.0, std::abs(bid.cD.front()));
  std::vector<SocBid> out;
  for (std::size_t n = 0; n < count; ++n) {
    SocBid b = bid;
    const double a = scale(rng);
    const double c = shift(rng) * top;
    const double delta = b.etaD * a * (bid.cD.front() - bid.cD.back()) + spread(rng) * top;
    for (std::size_t k = 0; k < b.segments(); ++k) {
      b.cD[k] = a * bid.cD[k] + c;
      b.cC[k] = b.etaC * (b.etaD * b.cD[k] - delta);
    }
    out.push_back(std::move(b));
  }
  return out;
}

Settlement settlement_summary(const DispatchSolution& solution, const PriceSchedule& prices) {
  const std::size_t T = solution.demand.size();
  prices.validate(T);
  Settlement s;
  for (std::size_t t = 0; t < T; ++t) s.demand_charge += solution.lambda.at(t) * solution.demand[t];
  for (const auto& d : solution.storages) {
    const auto p = prices.for_storage(d.id);
    Settlement::Account a;
    a.id = d.id;
    for (std::size_t t = 0; t < T; ++t) {
      a.charge_paid += p.charge[t] * d.gC[t];
      a.discharge_received += p.discharge[t] * d.gD[t];
    }
    a.net = a.discharge_received - a.charge_paid;
    s.storage_payments += a.net;
    s.storages.push_back(std::move(a));
  }
  s.operator_net = s.demand_charge - s.storage_payments;
  return s;
}

PerformanceMetrics performance_metrics(const std::vector<double>& gC, const std::vector<double>& gD,
                                       const DirectionalPrices& prices, double bid_cost) {
  PerformanceMetrics m;
  m.profit = payment(prices, gC, gD) - bid_cost;
  double revenue = 0.0;
  for (std::size_t t = 0; t < gC.size(); ++t) {
    m.mileage += gC[t] + gD[t];
    revenue += prices.discharge[t] * gD[t];
  }
  m.margin = m.profit / std::max(revenue, 1e-12);
  return m;
}

}  // namespace socdispatch
