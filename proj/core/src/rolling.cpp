#include "socdispatch/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "socdispatch/error.hpp"

namespace socdispatch {

void ForecastSet::validate(std::size_t T) const {
  if (W == 0) throw ValidationError("window length must be at least 1");
  if (windows.size() != T)
    throw ValidationError("forecast set has " + std::to_string(windows.size()) + " windows, horizon is " +
                          std::to_string(T));
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t len = std::min(W, T - t);
    if (windows[t].size() != len)
      throw ValidationError("forecast window " + std::to_string(t + 1) + " has " +
                            std::to_string(windows[t].size()) + " entries, expected " + std::to_string(len));
    for (double d : windows[t])
      if (!std::isfinite(d)) throw ValidationError("forecast window " + std::to_string(t + 1) + " is not finite");
  }
}

ForecastSet make_forecasts(const Scenario& scenario, std::size_t W, const ForecastError& error,
                           unsigned long long seed) {
  if (W == 0) throw ValidationError("window length must be at least 1");
  if (!std::isfinite(error.sigma) || error.sigma < 0.0)
    throw ValidationError("forecast noise width must be finite and nonnegative");
  for (double o : error.offsets)
    if (!std::isfinite(o)) throw ValidationError("forecast offsets must be finite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  ForecastSet f;
  f.W = W;
  const bool perturb = error.kind != ForecastError::Kind::none;
  f.provenance = perturb ? ForecastProvenance::perturbed : ForecastProvenance::exact;
  const std::size_t T = scenario.T;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> w(scenario.demand.begin() + static_cast<std::ptrdiff_t>(t),
                          scenario.demand.begin() + static_cast<std::ptrdiff_t>(std::min(t + W, T)));
    for (std::size_t k = 1; perturb && k < w.size(); ++k) {
      double term = error.offsets.empty() ? 0.0 : error.offsets[std::min(k, error.offsets.size()) - 1];
      if (error.sigma > 0.0) term += error.sigma * noise(rng);
      if (error.kind == ForecastError::Kind::additive) w[k] += term;
      else w[k] *= 1.0 + term;
    }
    f.windows.push_back(std::move(w));
  }
  return f;
}

RollingResult rolling_dispatch(const Scenario& scenario, const ForecastSet& forecasts, CostMode mode) {
  scenario.validate();
  forecasts.validate(scenario.T);
  const std::size_t T = scenario.T;
  const std::size_t N = scenario.fleet.size();

  RollingResult r;
  r.W = forecasts.W;
  r.mode = mode;
  r.binding.resize(N);
  r.tlmp.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& u = scenario.fleet[i];
    r.binding[i].id = u.id;
    r.binding[i].etaC = u.bid.etaC;
    r.binding[i].etaD = u.bid.etaD;
    r.binding[i].e.push_back(u.spec.s);
    if (mode == CostMode::end_segment_linear) {
      r.gamma.push_back(scenario.gamma_of(i));
      r.binding[i].gamma = r.gamma.back();
    } else {
      r.gamma.push_back(std::nullopt);
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    Scenario w = scenario;
    w.T = forecasts.windows[t].size();
    w.demand = forecasts.windows[t];
    w.demand[0] = scenario.demand[t];
    for (std::size_t i = 0; i < N; ++i) {
      auto& sp = w.fleet[i].spec;
      const auto& b = r.binding[i];
      sp.s = std::clamp(b.e.back(), sp.eMin, sp.eMax);
      if (t > 0) {
        sp.g0C = std::clamp(b.gC.back(), 0.0, sp.gCmax);
        sp.g0D = std::clamp(b.gD.back(), 0.0, sp.gDmax);
      }
    }
    CostMode wmode = mode;
    if (mode == CostMode::end_segment_linear && scenario.options.gamma_final_window_only && t + w.T < T)
      wmode = CostMode::epigraph;

    DispatchSolution sol;
    try {
      sol = solve_one_shot(w, wmode);
    } catch (const InfeasibleError& e) {
      r.failure = RollingFailure{t, e.what(), e.details()};
      return r;
    } catch (const Error& e) {
      r.failure = RollingFailure{t, e.what(), {}};
      return r;
    }

    r.lambda.push_back(sol.lambda[0]);
    for (std::size_t i = 0; i < N; ++i) {
      const auto& d = sol.storages[i];
      auto& b = r.binding[i];
      b.gC.push_back(d.gC[0]);
      b.gD.push_back(d.gD[0]);
      b.e.push_back(b.e.back() + b.etaC * d.gC[0] - d.gD[0] / b.etaD);
      const auto p = tlmp(sol, d.id);
      r.tlmp[i].charge.push_back(p.charge[0]);
      r.tlmp[i].discharge.push_back(p.discharge[0]);
    }
    r.windows.push_back(std::move(sol));
  }

  for (std::size_t i = 0; i < N; ++i) {
    const auto& u = scenario.fleet[i];
    r.objective += market_bid_cost(u.bid, u.spec.s, r.binding[i].gC, r.binding[i].gD, r.gamma[i]);
  }
  return r;
}

PriceSchedule r_lmp(const RollingResult& result) {
  if (!result.complete()) throw ContractError("rolling run stopped at window " +
                                              std::to_string(result.failure->window + 1));
  PriceSchedule p;
  p.pi = result.lambda;
  return p;
}

PriceSchedule r_tlmp(const RollingResult& result) {
  if (!result.complete()) throw ContractError("rolling run stopped at window " +
                                              std::to_string(result.failure->window + 1));
  PriceSchedule p;
  p.kind = PriceSchedule::Kind::discriminative;
  for (std::size_t i = 0; i < result.binding.size(); ++i) {
    p.ids.push_back(result.binding[i].id);
    p.per_storage.push_back(result.tlmp[i]);
  }
  return p;
}

RollingLocAudit rolling_loc_audit(const Scenario& scenario, const ForecastSet& forecasts, CostMode mode) {
  RollingLocAudit a;
  a.run = rolling_dispatch(scenario, forecasts, mode);
  if (!a.run.complete()) {
    const auto& f = *a.run.failure;
    throw InfeasibleError("rolling window " + std::to_string(f.window + 1) + " failed: " + f.message,
                          f.details);
  }
  DispatchSolution realized;
  realized.demand = scenario.demand;
  realized.lambda = a.run.lambda;
  realized.storages = a.run.binding;
  realized.has_duals = true;
  a.r_lmp = loc_audit(scenario, realized, r_lmp(a.run));
  a.r_tlmp = loc_audit(scenario, realized, r_tlmp(a.run));
  return a;
}

}  // namespace socdispatch
