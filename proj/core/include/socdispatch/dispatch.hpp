#pragma once

// One-shot multi-interval economic dispatch of a storage fleet.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "socdispatch/bids.hpp"
#include "socdispatch/linprog.hpp"

namespace socdispatch {

struct StorageUnit {
  std::string id;
  SocBid bid;
  StorageSpec spec;
  std::optional<std::size_t> gamma;  // overrides ScenarioOptions::gamma
};

struct ScenarioOptions {
  std::size_t window = 0;  // 0 means the whole horizon
  std::optional<std::size_t> gamma;
  bool gamma_final_window_only = false;
  lp::Tolerances tol;
};

struct Scenario {
  std::string name;
  std::string description;
  std::size_t T = 0;
  std::vector<double> demand;
  std::vector<StorageUnit> fleet;
  ScenarioOptions options;

  std::optional<std::size_t> gamma_of(std::size_t unit) const;
  /// Structural checks plus bid validity and physical limits for every unit.
  /// Throws ValidationError listing every violation found.
  void validate() const;
};

enum class CostMode { epigraph, end_segment_linear };

/// Primal trajectory and multipliers of one storage. Multiplier vectors are
/// empty when the solution carries no duals.
struct StorageDispatch {
  std::string id;
  double etaC = 1.0;
  double etaD = 1.0;
  std::vector<double> gC, gD;
  std::vector<double> e;  // length T+1
  double theta = 0.0;     // epigraph value, or the linear cost in gamma mode
  double cost = 0.0;      // bid cost of the trajectory under the solve's cost mode

  std::vector<double> phi;             // SoC transition
  std::vector<double> muC_lo, muC_hi;  // ramp rows on charge
  std::vector<double> muD_lo, muD_hi;  // ramp rows on discharge
  std::vector<double> rhoC_lo, rhoC_hi;
  std::vector<double> rhoD_lo, rhoD_hi;
  std::vector<double> soc_lo, soc_hi;  // bounds on e[1..T]
  std::vector<double> cut_weight;      // epigraph mode only
  double terminal_lo = 0.0;            // gamma mode terminal segment row
  double terminal_hi = 0.0;
  std::optional<std::size_t> gamma;
};

struct DispatchSolution {
  CostMode mode = CostMode::epigraph;
  std::vector<double> demand;
  std::vector<StorageDispatch> storages;
  std::vector<double> lambda;
  double objective = 0.0;
  bool has_duals = false;
  bool lemma1_ok = true;
  bool nonneg_lmp = true;
  std::size_t iterations = 0;

  const StorageDispatch& storage(const std::string& id) const;
};

struct StorageLayout {
  std::string id;
  std::size_t gC = 0, gD = 0, e = 0;  // first index of each length-T block
  std::optional<std::size_t> theta;
  std::vector<std::size_t> soc_rows, rampC_rows, rampD_rows, cut_rows;
  std::optional<std::size_t> terminal_row;
  std::optional<std::size_t> gamma;
};

struct ClearingLp {
  lp::LpProblem problem;
  CostMode mode = CostMode::epigraph;
  std::vector<std::size_t> balance_rows;
  std::vector<StorageLayout> storages;
};

/// Rows: balance[t], soc[id][t], rampC[id][t], rampD[id][t], cut[id][j] and,
/// in gamma mode, terminal[id]; t and j are 1-based in labels.
ClearingLp build_clearing_lp(const Scenario& scenario, CostMode mode = CostMode::epigraph);

DispatchSolution solve_one_shot(const Scenario& scenario, CostMode mode = CostMode::epigraph);

struct OracleLimits {
  std::size_t max_T = 6;
  std::size_t max_K = 4;
  std::size_t max_N = 3;
};

/// Exhaustive search over end-of-interval segment assignments. Works for any
/// valid bid; returns primal values and objective only.
DispatchSolution oracle_enumerate(const Scenario& scenario, const OracleLimits& limits = {});

struct SimultaneityVerdict {
  bool ok = true;
  std::vector<std::vector<bool>> interval_ok;  // [storage][t]
  bool nonneg_lmp = true;
};

SimultaneityVerdict check_no_simultaneous(const DispatchSolution& solution, double tol = 1e-7);

struct KktReport {
  std::vector<std::vector<double>> charge;     // [storage][t]
  std::vector<std::vector<double>> discharge;  // [storage][t]
  std::vector<std::vector<double>> soc;        // [storage][t]
  std::vector<double> epigraph;                // [storage]
  double max_stationarity = 0.0;
  double max_complementarity = 0.0;
  double max_sign_violation = 0.0;

  double max_violation() const;
};

KktReport kkt_residuals_dispatch(const Scenario& scenario, const DispatchSolution& solution);

}  // namespace socdispatch
