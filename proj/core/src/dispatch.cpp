#include "socdispatch/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "socdispatch/error.hpp"
#include "storage_block.hpp"

namespace socdispatch {

using lp::kInf;
using lp::Term;

std::optional<std::size_t> Scenario::gamma_of(std::size_t unit) const {
  const auto& u = fleet.at(unit);
  if (u.gamma) return u.gamma;
  if (u.bid.segments() == 1) return 0;
  return options.gamma;
}

void Scenario::validate() const {
  std::vector<std::string> problems;
  if (T == 0) problems.push_back("horizon must be at least 1");
  if (demand.size() != T)
    problems.push_back("demand has " + std::to_string(demand.size()) + " entries, horizon is " +
                       std::to_string(T));
  for (std::size_t t = 0; t < demand.size(); ++t)
    if (!std::isfinite(demand[t])) problems.push_back("demand[" + std::to_string(t + 1) + "] is not finite");
  if (fleet.empty()) problems.push_back("fleet is empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const auto& u = fleet[i];
    const std::string who = "storage '" + u.id + "': ";
    if (u.id.empty()) problems.push_back("storage " + std::to_string(i + 1) + " has an empty id");
    if (!ids.insert(u.id).second) problems.push_back(who + "duplicate id");
    try {
      for (auto& m : validate_bid(u.bid).violations) problems.push_back(who + m);
      for (auto& m : validate_spec(u.spec, u.bid).violations) problems.push_back(who + m);
      if (auto g = gamma_of(i); g && *g >= u.bid.segments())
        problems.push_back(who + "end segment " + std::to_string(*g + 1) + " outside 1.." +
                           std::to_string(u.bid.segments()));
    } catch (const ValidationError& e) {
      problems.push_back(who + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid scenario";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
}

const StorageDispatch& DispatchSolution::storage(const std::string& id) const {
  for (const auto& s : storages)
    if (s.id == id) return s;
  throw ContractError("no storage '" + id + "' in solution");
}

double KktReport::max_violation() const {
  return std::max({max_stationarity, max_complementarity, max_sign_violation});
}

ClearingLp build_clearing_lp(const Scenario& scenario, CostMode mode) {
  scenario.validate();
  const std::size_t T = scenario.T;
  ClearingLp c;
  c.mode = mode;
  for (std::size_t i = 0; i < scenario.fleet.size(); ++i)
    c.storages.push_back(detail::add_storage_block(c.problem, scenario.fleet[i], T, mode,
                                                   scenario.gamma_of(i)));
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<Term> terms;
    for (const auto& L : c.storages) {
      terms.push_back({L.gD + t, 1.0});
      terms.push_back({L.gC + t, -1.0});
    }
    c.balance_rows.push_back(c.problem.add_equality("balance[" + std::to_string(t + 1) + "]",
                                                    std::move(terms), scenario.demand[t]));
  }
  return c;
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void capacity_precheck(const Scenario& scenario) {
  std::vector<std::string> details;
  for (std::size_t t = 0; t < scenario.T; ++t) {
    double up = 0.0, down = 0.0;
    for (const auto& u : scenario.fleet) {
      up += u.spec.gDmax;
      down += u.spec.gCmax;
    }
    const double d = scenario.demand[t];
    if (d > up)
      details.push_back("balance[" + std::to_string(t + 1) + "]: demand " + num(d) +
                        " exceeds total discharge capacity " + num(up));
    if (-d > down)
      details.push_back("balance[" + std::to_string(t + 1) + "]: surplus " + num(-d) +
                        " exceeds total charge capacity " + num(down));
  }
  if (!details.empty()) throw InfeasibleError("dispatch infeasible", details);
}

void flag_lemma1(DispatchSolution& s) {
  const auto v = check_no_simultaneous(s);
  s.lemma1_ok = v.ok;
  s.nonneg_lmp = v.nonneg_lmp;
}

}  // namespace

DispatchSolution solve_one_shot(const Scenario& scenario, CostMode mode) {
  auto clp = build_clearing_lp(scenario, mode);
  capacity_precheck(scenario);
  const auto sol = lp::solve_lp(clp.problem, scenario.options.tol);
  if (sol.status == lp::Status::infeasible)
    throw InfeasibleError("dispatch infeasible", sol.infeasible_rows);
  if (sol.status == lp::Status::unbounded)
    throw SolverError("clearing LP reported unbounded", sol.iterations);

  DispatchSolution out;
  out.mode = mode;
  out.demand = scenario.demand;
  out.objective = sol.objective;
  out.has_duals = true;
  out.iterations = sol.iterations;
  for (std::size_t t = 0; t < scenario.T; ++t) out.lambda.push_back(sol.row_dual[clp.balance_rows[t]]);
  for (std::size_t i = 0; i < scenario.fleet.size(); ++i)
    out.storages.push_back(
        detail::read_storage(sol, clp.storages[i], scenario.fleet[i], scenario.T, mode, true));
  flag_lemma1(out);
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration oracle

namespace {

// Integral of the charge benefit cC/etaC from E_1 up to e.
double benefit_integral(const SocBid& b, std::size_t k, double e) {
  double v = 0.0;
  for (std::size_t j = 0; j < k; ++j) v += b.cC[j] / b.etaC * (b.E[j + 1] - b.E[j]);
  return v + b.cC[k] / b.etaC * (e - b.E[k]);
}

// Integral of etaD * cD from E_1 up to e.
double cost_integral(const SocBid& b, std::size_t k, double e) {
  double v = 0.0;
  for (std::size_t j = 0; j < k; ++j) v += b.etaD * b.cD[j] * (b.E[j + 1] - b.E[j]);
  return v + b.etaD * b.cD[k] * (e - b.E[k]);
}

struct Box {
  double lo, hi;
};

std::vector<std::vector<std::size_t>> segment_sequences(const StorageUnit& u, std::size_t T) {
  const auto& b = u.bid;
  const auto& sp = u.spec;
  const std::size_t K = b.segments();
  std::vector<Box> box(K);
  for (std::size_t k = 0; k < K; ++k) box[k] = {std::max(b.E[k], sp.eMin), std::min(b.E[k + 1], sp.eMax)};
  const double up = sp.gCmax * b.etaC;
  const double down = sp.gDmax / b.etaD;
  constexpr double slack = 1e-9;

  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> seq;
  auto dfs = [&](auto&& self, Box prev) -> void {
    if (seq.size() == T) {
      out.push_back(seq);
      return;
    }
    for (std::size_t k = 0; k < K; ++k) {
      const Box& nb = box[k];
      if (nb.lo > nb.hi + slack) continue;
      if (nb.lo - prev.hi > up + slack) continue;
      if (prev.lo - nb.hi > down + slack) continue;
      seq.push_back(k);
      self(self, nb);
      seq.pop_back();
    }
  };
  dfs(dfs, Box{sp.s, sp.s});
  return out;
}

struct OracleLayout {
  std::size_t gC, gD, e;
};

}  // namespace

DispatchSolution oracle_enumerate(const Scenario& scenario, const OracleLimits& limits) {
  scenario.validate();
  const std::size_t T = scenario.T;
  const std::size_t N = scenario.fleet.size();
  // Single-segment units (generators, flexible loads) do not multiply the
  // search, so only multi-segment storages count against max_N.
  std::size_t K = 0;
  std::size_t multi = 0;
  for (const auto& u : scenario.fleet) {
    K = std::max(K, u.bid.segments());
    if (u.bid.segments() > 1) ++multi;
  }
  if (T > limits.max_T || K > limits.max_K || multi > limits.max_N)
    throw GuardRailError("enumeration oracle limited to T <= " + std::to_string(limits.max_T) +
                         ", K <= " + std::to_string(limits.max_K) + ", N <= " +
                         std::to_string(limits.max_N) + "; scenario has T = " + std::to_string(T) +
                         ", K = " + std::to_string(K) + ", N = " + std::to_string(multi));
  capacity_precheck(scenario);

  // Template LP; bounds and costs are rewritten for each assignment.
  lp::LpProblem p;
  std::vector<OracleLayout> lay(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& u = scenario.fleet[i];
    lay[i].gC = p.num_variables();
    for (std::size_t t = 0; t < T; ++t) p.add_variable(0.0, 0.0, u.spec.gCmax);
    lay[i].gD = p.num_variables();
    for (std::size_t t = 0; t < T; ++t) p.add_variable(0.0, 0.0, u.spec.gDmax);
    lay[i].e = p.num_variables();
    for (std::size_t t = 0; t < T; ++t) p.add_variable(0.0, u.spec.eMin, u.spec.eMax);
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<Term> terms{{lay[i].gC + t, u.bid.etaC}, {lay[i].gD + t, -1.0 / u.bid.etaD},
                              {lay[i].e + t, -1.0}};
      if (t > 0) terms.push_back({lay[i].e + t - 1, 1.0});
      p.add_equality("s" + std::to_string(i) + "_" + std::to_string(t), std::move(terms),
                     t == 0 ? -u.spec.s : 0.0);
      const std::string tag = std::to_string(i) + "_" + std::to_string(t);
      if (t == 0) {
        p.add_range("rc" + tag, {{lay[i].gC, 1.0}}, u.spec.g0C - u.spec.rCdown, u.spec.g0C + u.spec.rCup);
        p.add_range("rd" + tag, {{lay[i].gD, 1.0}}, u.spec.g0D - u.spec.rDdown, u.spec.g0D + u.spec.rDup);
      } else {
        p.add_range("rc" + tag, {{lay[i].gC + t, 1.0}, {lay[i].gC + t - 1, -1.0}}, -u.spec.rCdown, u.spec.rCup);
        p.add_range("rd" + tag, {{lay[i].gD + t, 1.0}, {lay[i].gD + t - 1, -1.0}}, -u.spec.rDdown, u.spec.rDup);
      }
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < N; ++i) {
      terms.push_back({lay[i].gD + t, 1.0});
      terms.push_back({lay[i].gC + t, -1.0});
    }
    p.add_equality("b" + std::to_string(t), std::move(terms), scenario.demand[t]);
  }

  std::vector<std::vector<std::vector<std::size_t>>> seqs(N);
  for (std::size_t i = 0; i < N; ++i) {
    seqs[i] = segment_sequences(scenario.fleet[i], T);
    if (seqs[i].empty())
      throw InfeasibleError("dispatch infeasible",
                            {"storage '" + scenario.fleet[i].id + "' has no reachable SoC path"});
  }

  // Linear cost of storage i under sequence `seq`: sets bounds and costs,
  // returns the constant term.
  auto apply = [&](std::size_t i, const std::vector<std::size_t>& seq) {
    const auto& u = scenario.fleet[i];
    const auto& b = u.bid;
    const auto& L = lay[i];
    const std::size_t m = segment_of(b, u.spec.s);
    double constant = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      p.set_bounds(L.gC + t, 0.0, u.spec.gCmax);
      p.set_bounds(L.gD + t, 0.0, u.spec.gDmax);
      p.set_cost(L.gC + t, 0.0);
      p.set_cost(L.gD + t, 0.0);
      p.set_cost(L.e + t, 0.0);
      const std::size_t k = seq[t];
      p.set_bounds(L.e + t, std::max(b.E[k], u.spec.eMin), std::min(b.E[k + 1], u.spec.eMax));
    }
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t a = t == 0 ? m : seq[t - 1];
      const std::size_t k = seq[t];
      const auto& vars = p.variables();
      auto add_e = [&](std::size_t step, std::size_t seg, double slope, double intercept) {
        // contribution slope * (e_step - E_seg) + intercept, with e_0 = s
        if (step == 0) {
          constant += slope * (u.spec.s - b.E[seg]) + intercept;
        } else {
          p.set_cost(L.e + step - 1, vars[L.e + step - 1].cost + slope);
          constant += -slope * b.E[seg] + intercept;
        }
      };
      if (a == k) {
        p.set_cost(L.gC + t, -b.cC[k]);
        p.set_cost(L.gD + t, b.cD[k]);
      } else if (k > a) {
        p.set_bounds(L.gD + t, 0.0, 0.0);
        add_e(t + 1, k, -b.cC[k] / b.etaC, -benefit_integral(b, k, b.E[k]));
        add_e(t, a, b.cC[a] / b.etaC, benefit_integral(b, a, b.E[a]));
      } else {
        p.set_bounds(L.gC + t, 0.0, 0.0);
        add_e(t, a, b.etaD * b.cD[a], cost_integral(b, a, b.E[a]));
        add_e(t + 1, k, -b.etaD * b.cD[k], -cost_integral(b, k, b.E[k]));
      }
    }
    return constant;
  };

  std::optional<double> best;
  std::vector<double> best_x;
  std::vector<double> best_constants(N);
  std::vector<std::size_t> idx(N, 0);
  std::vector<double> constants(N);
  for (;;) {
    double offset = 0.0;
    for (std::size_t i = 0; i < N; ++i) offset += constants[i] = apply(i, seqs[i][idx[i]]);
    p.set_objective_offset(offset);
    const auto sol = lp::solve_lp(p, scenario.options.tol);
    if (sol.status == lp::Status::optimal &&
        (!best || sol.objective < *best - 1e-9 * (1.0 + std::abs(*best)))) {
      best = sol.objective;
      best_x = sol.x;
      best_constants = constants;
    }
    bool done = true;
    for (std::size_t i = N; i-- > 0;) {
      if (++idx[i] < seqs[i].size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (done) break;
  }
  if (!best) throw InfeasibleError("dispatch infeasible", {"no segment assignment admits a feasible dispatch"});

  DispatchSolution out;
  out.demand = scenario.demand;
  out.objective = *best;
  out.has_duals = false;
  for (std::size_t i = 0; i < N; ++i) {
    const auto& u = scenario.fleet[i];
    StorageDispatch d;
    d.id = u.id;
    d.etaC = u.bid.etaC;
    d.etaD = u.bid.etaD;
    d.e.push_back(u.spec.s);
    for (std::size_t t = 0; t < T; ++t) {
      d.gC.push_back(best_x[lay[i].gC + t]);
      d.gD.push_back(best_x[lay[i].gD + t]);
      d.e.push_back(best_x[lay[i].e + t]);
    }
    out.storages.push_back(std::move(d));
  }
  flag_lemma1(out);
  return out;
}

SimultaneityVerdict check_no_simultaneous(const DispatchSolution& solution, double tol) {
  SimultaneityVerdict v;
  for (const auto& s : solution.storages) {
    std::vector<bool> row;
    for (std::size_t t = 0; t < s.gC.size(); ++t) {
      const bool ok = std::min(s.gC[t], s.gD[t]) <= tol;
      row.push_back(ok);
      v.ok = v.ok && ok;
    }
    v.interval_ok.push_back(std::move(row));
  }
  for (double l : solution.lambda) v.nonneg_lmp = v.nonneg_lmp && l >= -tol;
  return v;
}

KktReport kkt_residuals_dispatch(const Scenario& scenario, const DispatchSolution& solution) {
  if (!solution.has_duals) throw ContractError("dispatch solution carries no multipliers");
  if (solution.storages.size() != scenario.fleet.size())
    throw ContractError("solution and scenario fleets differ");
  KktReport report;
  for (std::size_t i = 0; i < scenario.fleet.size(); ++i)
    detail::storage_kkt(scenario.fleet[i], solution.storages[i], solution.lambda, solution.lambda,
                        report);
  return report;
}

}  // namespace socdispatch
