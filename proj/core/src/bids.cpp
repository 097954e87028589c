#include "socdispatch/bids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "socdispatch/error.hpp"

namespace socdispatch {

namespace {

constexpr double kSocTol = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_shape(const SocBid& bid) {
  const std::size_t K = bid.cC.size();
  if (K == 0) throw ValidationError("bid must have at least one segment");
  if (bid.cD.size() != K)
    throw ValidationError("cD has " + std::to_string(bid.cD.size()) + " entries, expected " +
                          std::to_string(K));
  if (bid.E.size() != K + 1)
    throw ValidationError("E has " + std::to_string(bid.E.size()) + " entries, expected " +
                          std::to_string(K + 1));
}

double clamp_soc(const SocBid& bid, double e, const char* what) {
  const double lo = bid.E.front();
  const double hi = bid.E.back();
  if (!(e >= lo - kSocTol && e <= hi + kSocTol))
    throw DomainError(std::string(what) + " SoC " + fmt(e) + " outside [" + fmt(lo) + ", " +
                      fmt(hi) + "]");
  return std::clamp(e, lo, hi);
}

void check_power(double g, const char* name) {
  if (!(g >= 0.0) || !std::isfinite(g))
    throw DomainError(std::string(name) + " must be a finite nonnegative power, got " + fmt(g));
}

}  // namespace

BidVerdict validate_bid(const SocBid& bid) {
  check_shape(bid);
  BidVerdict v;
  auto fail = [&](std::string msg) {
    v.ok = false;
    v.violations.push_back(std::move(msg));
  };
  const std::size_t K = bid.segments();
  for (double x : bid.E)
    if (!std::isfinite(x)) fail("E contains a non-finite value");
  for (std::size_t k = 0; k < K; ++k) {
    if (!std::isfinite(bid.cC[k]) || !std::isfinite(bid.cD[k]))
      fail("non-finite price at k=" + std::to_string(k + 1));
    if (!(bid.E[k] < bid.E[k + 1])) fail("E not strictly increasing at k=" + std::to_string(k + 1));
  }
  for (std::size_t k = 0; k + 1 < K; ++k) {
    if (bid.cC[k + 1] > bid.cC[k]) fail("cC not non-increasing at k=" + std::to_string(k + 1));
    if (bid.cD[k + 1] > bid.cD[k]) fail("cD not non-increasing at k=" + std::to_string(k + 1));
  }
  if (!(bid.etaC > 0.0 && bid.etaC <= 1.0)) fail("etaC " + fmt(bid.etaC) + " not in (0,1]");
  if (!(bid.etaD > 0.0 && bid.etaD <= 1.0)) fail("etaD " + fmt(bid.etaD) + " not in (0,1]");
  if (bid.etaC > 0.0 && bid.etaD > 0.0) {
    const double lhs = bid.cC.front() / bid.etaC;
    const double rhs = bid.cD.back() * bid.etaD;
    if (!(lhs < rhs))
      fail("spread condition violated: cC[1]/etaC = " + fmt(lhs) + " >= cD[K]*etaD = " + fmt(rhs));
  }
  return v;
}

BidVerdict validate_spec(const StorageSpec& spec, const SocBid& bid) {
  check_shape(bid);
  BidVerdict v;
  auto fail = [&](std::string msg) {
    v.ok = false;
    v.violations.push_back(std::move(msg));
  };
  const std::pair<const char*, double> nonneg[] = {
      {"gCmax", spec.gCmax}, {"gDmax", spec.gDmax}, {"rCup", spec.rCup},
      {"rCdown", spec.rCdown}, {"rDup", spec.rDup}, {"rDdown", spec.rDdown},
      {"g0C", spec.g0C}, {"g0D", spec.g0D}};
  for (const auto& [name, value] : nonneg)
    if (!(value >= 0.0) || !std::isfinite(value))
      fail(std::string(name) + " must be finite and nonnegative");
  if (!(spec.eMin <= spec.s && spec.s <= spec.eMax))
    fail("initial SoC " + fmt(spec.s) + " outside [eMin, eMax] = [" + fmt(spec.eMin) + ", " +
         fmt(spec.eMax) + "]");
  if (spec.eMin < bid.E.front() || spec.eMax > bid.E.back())
    fail("[eMin, eMax] not inside the bid's SoC range [" + fmt(bid.E.front()) + ", " +
         fmt(bid.E.back()) + "]");
  return v;
}

std::size_t segment_of(const SocBid& bid, double e) {
  check_shape(bid);
  e = clamp_soc(bid, e, "segment_of:");
  auto first = bid.E.begin() + 1;
  auto last = bid.E.end() - 1;
  return static_cast<std::size_t>(std::upper_bound(first, last, e) - first);
}

EdcrReport is_edcr(const SocBid& bid, double tol) {
  check_shape(bid);
  EdcrReport r;
  double scale = 1.0;
  for (std::size_t k = 0; k < bid.segments(); ++k)
    scale = std::max({scale, std::abs(bid.cC[k]), std::abs(bid.cD[k])});
  const double target = bid.etaC * bid.etaD;
  for (std::size_t k = 1; k < bid.segments(); ++k) {
    const double dC = bid.cC[k] - bid.cC[k - 1];
    const double dD = bid.cD[k] - bid.cD[k - 1];
    r.ratios.push_back(dD != 0.0 ? dC / dD : (dC == 0.0 ? target : kNaN));
    if (std::abs(dC - target * dD) > tol * scale) {
      r.edcr = false;
      r.violations.push_back(k);
    }
  }
  return r;
}

double charge_cost(const SocBid& bid, double e, double gC) {
  check_power(gC, "gC");
  const std::size_t m = segment_of(bid, e);
  const double end = e + gC * bid.etaC;
  if (end > bid.E.back() + kSocTol)
    throw DomainError("charging " + fmt(gC) + " from SoC " + fmt(e) + " exceeds E_{K+1} = " +
                      fmt(bid.E.back()));
  const std::size_t n = segment_of(bid, end);
  double value = gC * bid.cC[n];
  for (std::size_t k = m; k < n; ++k)
    value += (bid.cC[k] - bid.cC[k + 1]) / bid.etaC * (bid.E[k + 1] - e);
  return value;
}

double discharge_cost(const SocBid& bid, double e, double gD) {
  check_power(gD, "gD");
  const std::size_t m = segment_of(bid, e);
  const double end = e - gD / bid.etaD;
  if (end < bid.E.front() - kSocTol)
    throw DomainError("discharging " + fmt(gD) + " from SoC " + fmt(e) + " falls below E_1 = " +
                      fmt(bid.E.front()));
  const std::size_t n = segment_of(bid, end);
  double value = gD * bid.cD[n];
  for (std::size_t k = n + 1; k <= m; ++k)
    value += bid.etaD * (bid.cD[k - 1] - bid.cD[k]) * (bid.E[k] - e);
  return value;
}

double stage_cost(const SocBid& bid, double e, double gC, double gD) {
  if (gC > kSocTol && gD > kSocTol)
    throw DomainError("simultaneous charge " + fmt(gC) + " and discharge " + fmt(gD));
  return discharge_cost(bid, e, gD) - charge_cost(bid, e, gC);
}

std::vector<double> soc_path(const SocBid& bid, double s, const std::vector<double>& gC,
                             const std::vector<double>& gD) {
  if (gC.size() != gD.size()) throw ContractError("gC and gD lengths differ");
  std::vector<double> e(gC.size() + 1);
  e[0] = s;
  for (std::size_t t = 0; t < gC.size(); ++t)
    e[t + 1] = e[t] + gC[t] * bid.etaC - gD[t] / bid.etaD;
  return e;
}

double trajectory_cost(const SocBid& bid, double s, const std::vector<double>& gC,
                       const std::vector<double>& gD) {
  check_shape(bid);
  const auto e = soc_path(bid, s, gC, gD);
  double total = 0.0;
  for (std::size_t t = 0; t < gC.size(); ++t) {
    for (double x : {e[t], e[t + 1]})
      if (x < bid.E.front() - kSocTol || x > bid.E.back() + kSocTol)
        throw DomainError("SoC " + fmt(x) + " leaves the bid range in interval t=" +
                          std::to_string(t + 1));
    total += stage_cost(bid, e[t], gC[t], gD[t]);
  }
  return total;
}

double charge_potential(const SocBid& bid, double s) {
  const std::size_t i = segment_of(bid, s);
  const double E1 = bid.E.front();
  double h = bid.cC[i] * (s - E1) / bid.etaC;
  for (std::size_t k = 0; k < i; ++k) h += (bid.cC[k] - bid.cC[k + 1]) * (bid.E[k + 1] - E1) / bid.etaC;
  return h;
}

std::vector<AffinePiece> epigraph_pieces(const SocBid& bid, double s) {
  const double h = charge_potential(bid, s);
  const double E1 = bid.E.front();
  std::vector<AffinePiece> pieces;
  pieces.reserve(bid.segments());
  double crossed = 0.0;
  for (std::size_t j = 0; j < bid.segments(); ++j) {
    if (j > 0) crossed += (bid.cC[j - 1] - bid.cC[j]) * (bid.E[j] - E1) / bid.etaC;
    pieces.push_back({-crossed - bid.cC[j] * (s - E1) / bid.etaC + h, -bid.cC[j], bid.cD[j]});
  }
  return pieces;
}

AffinePiece end_segment_piece(const SocBid& bid, double s, std::size_t gamma) {
  if (gamma >= bid.segments())
    throw ValidationError("end segment " + std::to_string(gamma + 1) + " outside 1.." +
                          std::to_string(bid.segments()));
  if (!is_edcr(bid).edcr) throw PreconditionError("end-segment linear cost requires an EDCR bid");
  return epigraph_pieces(bid, s)[gamma];
}

ClosedFormCost edcr_closed_form_cost(const SocBid& bid, double s, const std::vector<double>& gC,
                                     const std::vector<double>& gD) {
  check_shape(bid);
  if (!is_edcr(bid).edcr) throw PreconditionError("closed-form cost requires an EDCR bid");
  const auto e = soc_path(bid, s, gC, gD);
  for (std::size_t t = 0; t < e.size(); ++t) clamp_soc(bid, e[t], "trajectory");
  double sumC = 0.0;
  double sumD = 0.0;
  for (std::size_t t = 0; t < gC.size(); ++t) {
    sumC += gC[t];
    sumD += gD[t];
  }

  ClosedFormCost out;
  out.max_form = -std::numeric_limits<double>::infinity();
  for (const auto& p : epigraph_pieces(bid, s))
    out.max_form = std::max(out.max_form, p.alpha + p.coefC * sumC + p.coefD * sumD);

  const std::size_t m = segment_of(bid, s);
  const std::size_t n = segment_of(bid, e.back());
  out.end_segment = n;
  double correction = 0.0;
  for (std::size_t k = m; k < n; ++k)
    correction -= (bid.cC[k] - bid.cC[k + 1]) / bid.etaC * (bid.E[k + 1] - s);
  for (std::size_t k = n + 1; k <= m; ++k)
    correction += bid.etaD * (bid.cD[k - 1] - bid.cD[k]) * (bid.E[k] - s);
  out.case_form = -bid.cC[n] * sumC + bid.cD[n] * sumD + correction;
  return out;
}

double integral_oracle_cost(const SocBid& bid, double e, double gC, double gD, double step) {
  if (!(step > 0.0)) throw DomainError("integration step must be positive");
  check_power(gC, "gC");
  check_power(gD, "gD");
  if (gC > kSocTol && gD > kSocTol)
    throw DomainError("simultaneous charge " + fmt(gC) + " and discharge " + fmt(gD));
  e = clamp_soc(bid, e, "initial");
  auto riemann = [&](double lo, double hi, auto&& price) {
    double sum = 0.0;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    for (std::size_t i = 0; i < n; ++i) {
      const double a = lo + static_cast<double>(i) * step;
      const double b = std::min(hi, a + step);
      sum += price(segment_of(bid, 0.5 * (a + b))) * (b - a);
    }
    return sum;
  };
  double cost = 0.0;
  if (gC > 0.0) {
    const double end = clamp_soc(bid, e + gC * bid.etaC, "charged");
    cost -= riemann(e, end, [&](std::size_t k) { return bid.cC[k] / bid.etaC; });
  }
  if (gD > 0.0) {
    const double end = clamp_soc(bid, e - gD / bid.etaD, "discharged");
    cost += riemann(end, e, [&](std::size_t k) { return bid.etaD * bid.cD[k]; });
  }
  return cost;
}

AffineProfile affine_composition_profile(const SocBid& bid, double s, std::vector<double> grid,
                                         double tol) {
  check_shape(bid);
  clamp_soc(bid, s, "initial");
  if (grid.empty()) {
    const double lo = bid.E.front() - s;
    const double hi = bid.E.back() - s;
    constexpr std::size_t kPoints = 101;
    for (std::size_t i = 0; i < kPoints; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1));
  }
  AffineProfile p;
  p.g = std::move(grid);
  p.cost.assign(p.g.size(), kNaN);
  p.feasible.assign(p.g.size(), false);
  for (std::size_t i = 0; i < p.g.size(); ++i) {
    const double g = p.g[i];
    const double peak = s + g;
    if (peak < bid.E.front() - kSocTol || peak > bid.E.back() + kSocTol) continue;
    std::vector<double> gC(2, 0.0), gD(2, 0.0);
    if (g >= 0.0) {
      gC[0] = g / bid.etaC;
      gD[1] = g * bid.etaD;
    } else {
      gD[0] = -g * bid.etaD;
      gC[1] = -g / bid.etaC;
    }
    try {
      p.cost[i] = trajectory_cost(bid, s, gC, gD);
      p.feasible[i] = true;
    } catch (const DomainError&) {
    }
  }
  for (std::size_t i = 1; i + 1 < p.g.size(); ++i) {
    if (!(p.feasible[i - 1] && p.feasible[i] && p.feasible[i + 1])) {
      p.second_difference.push_back(kNaN);
      continue;
    }
    const double w = (p.g[i] - p.g[i - 1]) / (p.g[i + 1] - p.g[i - 1]);
    const double chord = (1.0 - w) * p.cost[i - 1] + w * p.cost[i + 1];
    const double gap = chord - p.cost[i];
    p.second_difference.push_back(2.0 * gap);
    if (gap < -tol * (1.0 + std::abs(p.cost[i]))) p.violations.push_back(i);
  }
  return p;
}

std::pair<SocBid, StorageSpec> make_generator(double price, double capacity, double energy) {
  SocBid bid{{0.0, energy}, {price - 1.0}, {price}, 1.0, 1.0};
  StorageSpec spec;
  spec.gDmax = capacity;
  spec.rCup = spec.rCdown = spec.rDup = spec.rDdown = capacity;
  spec.eMax = energy;
  spec.s = energy;
  return {bid, spec};
}

std::pair<SocBid, StorageSpec> make_flexible_load(double value, double capacity, double energy) {
  SocBid bid{{0.0, energy}, {value}, {value + 1.0}, 1.0, 1.0};
  StorageSpec spec;
  spec.gCmax = capacity;
  spec.rCup = spec.rCdown = spec.rDup = spec.rDdown = capacity;
  spec.eMax = energy;
  spec.s = 0.0;
  return {bid, spec};
}

}  // namespace socdispatch
