#include "storage_block.hpp"

#include <algorithm>
#include <cmath>

#include "socdispatch/error.hpp"

namespace socdispatch::detail {

using lp::kInf;
using lp::Term;

std::string row_label(const char* family, const std::string& id, std::size_t index) {
  return std::string(family) + "[" + id + "][" + std::to_string(index) + "]";
}

StorageLayout add_storage_block(lp::LpProblem& problem, const StorageUnit& unit, std::size_t T,
                                CostMode mode, std::optional<std::size_t> gamma) {
  const auto& bid = unit.bid;
  const auto& spec = unit.spec;
  StorageLayout L;
  L.id = unit.id;
  if (mode == CostMode::end_segment_linear) {
    if (!gamma) throw PreconditionError("end-segment cost mode needs an end segment for '" + unit.id + "'");
    if (*gamma >= bid.segments())
      throw ValidationError("end segment " + std::to_string(*gamma + 1) + " of '" + unit.id +
                            "' outside 1.." + std::to_string(bid.segments()));
    L.gamma = gamma;
  }

  std::optional<AffinePiece> linear;
  if (mode == CostMode::end_segment_linear) linear = end_segment_piece(bid, spec.s, *gamma);

  L.gC = problem.num_variables();
  for (std::size_t t = 0; t < T; ++t)
    problem.add_variable(linear ? linear->coefC : 0.0, 0.0, spec.gCmax,
                         row_label("gC", unit.id, t + 1));
  L.gD = problem.num_variables();
  for (std::size_t t = 0; t < T; ++t)
    problem.add_variable(linear ? linear->coefD : 0.0, 0.0, spec.gDmax,
                         row_label("gD", unit.id, t + 1));
  L.e = problem.num_variables();
  for (std::size_t t = 0; t < T; ++t)
    problem.add_variable(0.0, spec.eMin, spec.eMax, row_label("e", unit.id, t + 2));

  for (std::size_t t = 0; t < T; ++t) {
    std::vector<Term> terms{{L.gC + t, bid.etaC}, {L.gD + t, -1.0 / bid.etaD}, {L.e + t, -1.0}};
    double rhs = -spec.s;
    if (t > 0) {
      terms.push_back({L.e + t - 1, 1.0});
      rhs = 0.0;
    }
    L.soc_rows.push_back(problem.add_equality(row_label("soc", unit.id, t + 1), std::move(terms), rhs));
  }

  auto ramp = [&](const char* family, std::size_t first, double g0, double up, double down,
                  std::vector<std::size_t>& rows) {
    for (std::size_t t = 0; t < T; ++t) {
      if (t == 0) {
        rows.push_back(problem.add_range(row_label(family, unit.id, 1), {{first, 1.0}},
                                         g0 - down, g0 + up));
      } else {
        rows.push_back(problem.add_range(row_label(family, unit.id, t + 1),
                                         {{first + t, 1.0}, {first + t - 1, -1.0}}, -down, up));
      }
    }
  };
  ramp("rampC", L.gC, spec.g0C, spec.rCup, spec.rCdown, L.rampC_rows);
  ramp("rampD", L.gD, spec.g0D, spec.rDup, spec.rDdown, L.rampD_rows);

  if (linear) {
    problem.set_objective_offset(problem.objective_offset() + linear->alpha);
    const std::size_t g = *gamma;
    L.terminal_row = problem.add_range("terminal[" + unit.id + "]", {{L.e + T - 1, 1.0}},
                                       bid.E[g], bid.E[g + 1]);
  } else {
    if (!is_edcr(bid).edcr)
      throw PreconditionError("storage '" + unit.id +
                              "' does not satisfy EDCR; the epigraph clearing needs EDCR bids, "
                              "use the enumeration oracle instead");
    L.theta = problem.add_variable(1.0, -kInf, kInf, "theta[" + unit.id + "]");
    const auto pieces = epigraph_pieces(bid, spec.s);
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      std::vector<Term> terms{{*L.theta, 1.0}};
      for (std::size_t t = 0; t < T; ++t) {
        terms.push_back({L.gC + t, -pieces[j].coefC});
        terms.push_back({L.gD + t, -pieces[j].coefD});
      }
      L.cut_rows.push_back(
          problem.add_range(row_label("cut", unit.id, j + 1), std::move(terms), pieces[j].alpha, kInf));
    }
  }
  return L;
}

StorageDispatch read_storage(const lp::LpSolution& sol, const StorageLayout& L,
                             const StorageUnit& unit, std::size_t T, CostMode mode,
                             bool with_duals) {
  StorageDispatch d;
  d.id = unit.id;
  d.etaC = unit.bid.etaC;
  d.etaD = unit.bid.etaD;
  d.gamma = L.gamma;
  d.gC.resize(T);
  d.gD.resize(T);
  d.e.resize(T + 1);
  d.e[0] = unit.spec.s;
  for (std::size_t t = 0; t < T; ++t) {
    d.gC[t] = sol.x[L.gC + t];
    d.gD[t] = sol.x[L.gD + t];
    d.e[t + 1] = sol.x[L.e + t];
  }
  double sumC = 0.0, sumD = 0.0;
  for (std::size_t t = 0; t < T; ++t) sumC += d.gC[t], sumD += d.gD[t];
  if (mode == CostMode::epigraph) {
    d.theta = sol.x[*L.theta];
    d.cost = -kInf;
    for (const auto& p : epigraph_pieces(unit.bid, unit.spec.s))
      d.cost = std::max(d.cost, p.alpha + p.coefC * sumC + p.coefD * sumD);
  } else {
    const auto p = end_segment_piece(unit.bid, unit.spec.s, *L.gamma);
    d.cost = p.alpha + p.coefC * sumC + p.coefD * sumD;
    d.theta = d.cost;
  }
  if (!with_duals) return d;

  for (std::size_t t = 0; t < T; ++t) {
    d.phi.push_back(sol.row_dual[L.soc_rows[t]]);
    d.muC_lo.push_back(sol.lower_dual(L.rampC_rows[t]));
    d.muC_hi.push_back(sol.upper_dual(L.rampC_rows[t]));
    d.muD_lo.push_back(sol.lower_dual(L.rampD_rows[t]));
    d.muD_hi.push_back(sol.upper_dual(L.rampD_rows[t]));
    d.rhoC_lo.push_back(sol.lower_bound_dual(L.gC + t));
    d.rhoC_hi.push_back(sol.upper_bound_dual(L.gC + t));
    d.rhoD_lo.push_back(sol.lower_bound_dual(L.gD + t));
    d.rhoD_hi.push_back(sol.upper_bound_dual(L.gD + t));
    d.soc_lo.push_back(sol.lower_bound_dual(L.e + t));
    d.soc_hi.push_back(sol.upper_bound_dual(L.e + t));
  }
  for (std::size_t r : L.cut_rows) d.cut_weight.push_back(sol.lower_dual(r));
  if (L.terminal_row) {
    d.terminal_lo = sol.lower_dual(*L.terminal_row);
    d.terminal_hi = sol.upper_dual(*L.terminal_row);
  }
  return d;
}

std::vector<double> ramp_price(const std::vector<double>& lo, const std::vector<double>& hi) {
  const std::size_t T = lo.size();
  std::vector<double> delta(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double here = hi[t] - lo[t];
    const double next = t + 1 < T ? hi[t + 1] - lo[t + 1] : 0.0;
    delta[t] = next - here;
  }
  return delta;
}

void storage_kkt(const StorageUnit& unit, const StorageDispatch& d,
                 const std::vector<double>& priceC, const std::vector<double>& priceD,
                 KktReport& report) {
  const auto& bid = unit.bid;
  const auto& spec = unit.spec;
  const std::size_t T = d.gC.size();
  if (d.phi.size() != T) throw ContractError("storage '" + d.id + "' carries no multipliers");
  if (priceC.size() != T || priceD.size() != T) throw ContractError("price length differs from horizon");

  double subC = 0.0, subD = 0.0;
  double epi = 0.0;
  if (d.gamma) {
    subC = bid.cC[*d.gamma];
    subD = bid.cD[*d.gamma];
  } else {
    if (d.cut_weight.size() != bid.segments())
      throw ContractError("storage '" + d.id + "' carries no epigraph weights");
    double wsum = 0.0;
    for (std::size_t j = 0; j < bid.segments(); ++j) {
      subC += d.cut_weight[j] * bid.cC[j];
      subD += d.cut_weight[j] * bid.cD[j];
      wsum += d.cut_weight[j];
    }
    epi = 1.0 - wsum;
  }

  const auto dC = ramp_price(d.muC_lo, d.muC_hi);
  const auto dD = ramp_price(d.muD_lo, d.muD_hi);
  std::vector<double> rc(T), rd(T), rs(T);
  double comp = 0.0;
  double sign = 0.0;
  auto product = [&](double mult, double slack) {
    sign = std::max(sign, -mult);
    if (std::isfinite(slack)) comp = std::max(comp, std::abs(mult * slack));
    else if (mult != 0.0) comp = std::max(comp, std::abs(mult));
  };
  for (std::size_t t = 0; t < T; ++t) {
    const double piC = priceC[t] - bid.etaC * d.phi[t] - dC[t];
    const double piD = priceD[t] - d.phi[t] / bid.etaD + dD[t];
    rc[t] = piC - subC - d.rhoC_lo[t] + d.rhoC_hi[t];
    rd[t] = subD - piD - d.rhoD_lo[t] + d.rhoD_hi[t];
    const double next = t + 1 < T ? d.phi[t + 1] : 0.0;
    rs[t] = d.phi[t] - next - d.soc_lo[t] + d.soc_hi[t];
    if (t + 1 == T && d.gamma) rs[t] -= d.terminal_lo - d.terminal_hi;

    product(d.rhoC_lo[t], d.gC[t]);
    product(d.rhoC_hi[t], spec.gCmax - d.gC[t]);
    product(d.rhoD_lo[t], d.gD[t]);
    product(d.rhoD_hi[t], spec.gDmax - d.gD[t]);
    product(d.soc_lo[t], d.e[t + 1] - spec.eMin);
    product(d.soc_hi[t], spec.eMax - d.e[t + 1]);
    const double prevC = t == 0 ? spec.g0C : d.gC[t - 1];
    const double prevD = t == 0 ? spec.g0D : d.gD[t - 1];
    product(d.muC_lo[t], d.gC[t] - prevC + spec.rCdown);
    product(d.muC_hi[t], spec.rCup - (d.gC[t] - prevC));
    product(d.muD_lo[t], d.gD[t] - prevD + spec.rDdown);
    product(d.muD_hi[t], spec.rDup - (d.gD[t] - prevD));
  }
  if (d.gamma) {
    product(d.terminal_lo, d.e[T] - bid.E[*d.gamma]);
    product(d.terminal_hi, bid.E[*d.gamma + 1] - d.e[T]);
  } else {
    double sumC = 0.0, sumD = 0.0;
    for (std::size_t t = 0; t < T; ++t) sumC += d.gC[t], sumD += d.gD[t];
    const auto pieces = epigraph_pieces(bid, spec.s);
    for (std::size_t j = 0; j < pieces.size(); ++j)
      product(d.cut_weight[j],
              d.theta - (pieces[j].alpha + pieces[j].coefC * sumC + pieces[j].coefD * sumD));
  }

  for (std::size_t t = 0; t < T; ++t)
    report.max_stationarity =
        std::max({report.max_stationarity, std::abs(rc[t]), std::abs(rd[t]), std::abs(rs[t])});
  report.max_stationarity = std::max(report.max_stationarity, std::abs(epi));
  report.max_complementarity = std::max(report.max_complementarity, comp);
  report.max_sign_violation = std::max(report.max_sign_violation, sign);
  report.charge.push_back(std::move(rc));
  report.discharge.push_back(std::move(rd));
  report.soc.push_back(std::move(rs));
  report.epigraph.push_back(epi);
}

}  // namespace socdispatch::detail
