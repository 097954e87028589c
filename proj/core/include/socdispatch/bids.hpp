#pragma once

// SoC-dependent bids and the storage cost functions built on them.
//
// Indices are 0-based in the API: segment k covers [E[k], E[k+1]) and the top
// segment K-1 is closed. Messages and serialized forms use 1-based indices.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace socdispatch {

struct SocBid {
  std::vector<double> E;   // K+1 breakpoints, MWh
  std::vector<double> cC;  // charge benefit per segment, $/MWh
  std::vector<double> cD;  // discharge cost per segment, $/MWh
  double etaC = 1.0;
  double etaD = 1.0;

  std::size_t segments() const noexcept { return cC.size(); }
};

struct StorageSpec {
  double gCmax = 0.0;
  double gDmax = 0.0;
  double rCup = 0.0;
  double rCdown = 0.0;
  double rDup = 0.0;
  double rDdown = 0.0;
  double eMin = 0.0;
  double eMax = 0.0;
  double s = 0.0;
  double g0C = 0.0;
  double g0D = 0.0;
};

struct Trajectory {
  std::vector<double> gC;
  std::vector<double> gD;
  std::vector<double> e;  // length T+1, e[0] = s
};

struct BidVerdict {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Increasing breakpoints, non-increasing prices, efficiencies in (0,1] and
/// cC[1]/etaC < cD[K] etaD. Throws ValidationError on inconsistent lengths.
BidVerdict validate_bid(const SocBid& bid);

/// Physical limits of a storage paired with its bid.
BidVerdict validate_spec(const StorageSpec& spec, const SocBid& bid);

/// Segment index containing `e`; throws DomainError outside [E_1, E_{K+1}].
std::size_t segment_of(const SocBid& bid, double e);

struct EdcrReport {
  bool edcr = true;
  /// Per k = 1..K-1: (cC[k]-cC[k-1]) / (cD[k]-cD[k-1]); NaN when undefined.
  std::vector<double> ratios;
  /// Segment indices k whose decrement pair violates the condition.
  std::vector<std::size_t> violations;
};

EdcrReport is_edcr(const SocBid& bid, double tol = 1e-9);

/// Benefit f^C of charging gC from SoC e.
double charge_cost(const SocBid& bid, double e, double gC);
/// Cost f^D of discharging gD from SoC e.
double discharge_cost(const SocBid& bid, double e, double gD);
/// f^D - f^C; rejects simultaneous charge and discharge.
double stage_cost(const SocBid& bid, double e, double gC, double gD);

/// SoC path e[0..T] for initial SoC s; no bound checks.
std::vector<double> soc_path(const SocBid& bid, double s, const std::vector<double>& gC,
                             const std::vector<double>& gD);

double trajectory_cost(const SocBid& bid, double s, const std::vector<double>& gC,
                       const std::vector<double>& gD);

struct ClosedFormCost {
  double max_form = 0.0;
  double case_form = 0.0;
  std::size_t end_segment = 0;
};

/// Multi-interval cost of an EDCR bid, both as a max over affine pieces and
/// via the start/end segment case expression.
ClosedFormCost edcr_closed_form_cost(const SocBid& bid, double s,
                                     const std::vector<double>& gC,
                                     const std::vector<double>& gD);

/// alpha + coefC * sum(gC) + coefD * sum(gD)
struct AffinePiece {
  double alpha = 0.0;
  double coefC = 0.0;
  double coefD = 0.0;
};

double charge_potential(const SocBid& bid, double s);  // h^C(s)
std::vector<AffinePiece> epigraph_pieces(const SocBid& bid, double s);

/// Linear cost with the terminal SoC confined to segment gamma.
AffinePiece end_segment_piece(const SocBid& bid, double s, std::size_t gamma);

/// Midpoint Riemann sum of the marginal bid curve over the traversed SoC.
double integral_oracle_cost(const SocBid& bid, double e, double gC, double gD, double step);

struct AffineProfile {
  std::vector<double> g;     // SoC displacement in interval 1
  std::vector<double> cost;  // NaN where infeasible
  std::vector<bool> feasible;
  /// Entry i-1 for interior point i: twice the gap between the chord of its
  /// neighbours and the cost there. Equals the ordinary second difference on
  /// uniform grids; NaN when a neighbour is infeasible.
  std::vector<double> second_difference;
  std::vector<std::size_t> violations;  // grid indices where midpoint convexity fails
};

/// Two-interval loop-back cost: move the SoC by g in interval 1 and return
/// it to s in interval 2.
AffineProfile affine_composition_profile(const SocBid& bid, double s,
                                         std::vector<double> grid = {},
                                         double tol = 1e-9);

/// Generator as generalized storage: discharge-only at `price`.
std::pair<SocBid, StorageSpec> make_generator(double price, double capacity, double energy);
/// Flexible load as generalized storage: charge-only with benefit `value`.
std::pair<SocBid, StorageSpec> make_flexible_load(double value, double capacity, double energy);

}  // namespace socdispatch
