#pragma once

// Prices, self-scheduling profit and lost opportunity cost.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "socdispatch/bids.hpp"
#include "socdispatch/dispatch.hpp"
#include "socdispatch/linprog.hpp"

namespace socdispatch {

/// Prices one storage faces per interval: it pays `charge` for gC and
/// receives `discharge` for gD.
struct DirectionalPrices {
  std::vector<double> charge;
  std::vector<double> discharge;

  static DirectionalPrices uniform(const std::vector<double>& pi) { return {pi, pi}; }
  std::size_t horizon() const noexcept { return charge.size(); }
};

struct PriceSchedule {
  enum class Kind { uniform, discriminative };

  Kind kind = Kind::uniform;
  std::vector<double> pi;  // uniform
  std::vector<std::string> ids;
  std::vector<DirectionalPrices> per_storage;  // discriminative, aligned with ids

  std::size_t horizon() const;
  /// Prices seen by storage `id`; throws ContractError when absent.
  DirectionalPrices for_storage(const std::string& id) const;
  /// Lengths agree with T and every storage carries both directions.
  void validate(std::size_t T) const;
};

PriceSchedule extract_lmp(const DispatchSolution& solution);

/// piC = lambda - etaC phi - DeltaC, piD = lambda - phi / etaD + DeltaD.
DirectionalPrices tlmp(const DispatchSolution& solution, const std::string& storage_id);
/// TLMP of every storage in the solution.
PriceSchedule tlmp_schedule(const DispatchSolution& solution);

struct SelfSchedule {
  double Q = 0.0;  // payment - bid cost at the optimum
  double payment = 0.0;
  double bid_cost = 0.0;
  StorageDispatch dispatch;  // trajectory and multipliers
  CostMode mode = CostMode::epigraph;

  Trajectory trajectory() const { return {dispatch.gC, dispatch.gD, dispatch.e}; }
};

/// Maximizes payment minus bid cost over the storage's own constraints.
/// With `gamma` the cost is the end-segment linear form and e[T] is confined
/// to that segment; otherwise the bid must satisfy EDCR.
SelfSchedule individual_profit_max(const SocBid& bid, const StorageSpec& spec,
                                   const DirectionalPrices& prices,
                                   std::optional<std::size_t> gamma = std::nullopt,
                                   const lp::Tolerances& tol = {});

/// sum(piD gD - piC gC)
double payment(const DirectionalPrices& prices, const std::vector<double>& gC,
               const std::vector<double>& gD);

/// Bid cost matching the self-schedule objective: the end-segment linear form
/// when `gamma` is set, else the epigraph maximum (EDCR required).
double market_bid_cost(const SocBid& bid, double s, const std::vector<double>& gC,
                       const std::vector<double>& gD, std::optional<std::size_t> gamma);

struct LocEntry {
  std::string id;
  double Q = 0.0;
  double payment = 0.0;
  double bid_cost = 0.0;
  double loc = 0.0;
  Trajectory self_schedule;
};

struct LocReport {
  std::vector<LocEntry> entries;
  double max_loc = 0.0;
  double min_loc = 0.0;
  bool negative_prices = false;  // some price below zero; audited anyway

  const LocEntry& entry(const std::string& id) const;
};

/// LOC = Q(prices) - payment(dispatch) + F(dispatch).
LocEntry loc(const DirectionalPrices& prices, const std::vector<double>& gC,
             const std::vector<double>& gD, const SocBid& bid, const StorageSpec& spec,
             std::optional<std::size_t> gamma = std::nullopt, const lp::Tolerances& tol = {});

/// LOC of every storage in `solution` under `prices`, in fleet order. Uses
/// the solution's end segments when it was cleared in gamma mode.
LocReport loc_audit(const Scenario& scenario, const DispatchSolution& solution,
                    const PriceSchedule& prices);

KktReport kkt_residuals_individual(const SocBid& bid, const StorageSpec& spec,
                                   const DirectionalPrices& prices, const SelfSchedule& schedule);

struct ProbeRow {
  std::string label;
  SocBid bid;
  bool evaluated = false;
  std::string skipped_reason;
  double profit = 0.0;  // at the truthful prices, under the true bid cost
  std::vector<double> gC, gD;
};

struct ProbeTable {
  std::vector<double> prices;
  std::vector<ProbeRow> rows;  // row 0 is the truthful bid
  double truthful_profit = 0.0;
  double max_gain = 0.0;  // best perturbed profit minus truthful profit
};

/// Re-clears the market with each perturbed bid for `storage_id` and
/// evaluates the storage's true profit at the truthful run's LMP.
ProbeTable truthfulness_probe(const Scenario& scenario, const std::string& storage_id,
                              const std::vector<SocBid>& perturbations);

/// Random bids that stay valid and EDCR: an affine map of cD and a
/// fresh charge/discharge spread, with the original breakpoints.
std::vector<SocBid> edcr_perturbations(const SocBid& bid, std::size_t count, unsigned long long seed);

struct Settlement {
  struct Account {
    std::string id;
    double charge_paid = 0.0;
    double discharge_received = 0.0;
    double net = 0.0;  // received minus paid
  };
  std::vector<Account> storages;
  double demand_charge = 0.0;  // lambda . demand
  double storage_payments = 0.0;
  double operator_net = 0.0;
};

/// Demand always pays the LMP; storages are paid by `prices`.
Settlement settlement_summary(const DispatchSolution& solution, const PriceSchedule& prices);

struct PerformanceMetrics {
  double profit = 0.0;
  double mileage = 0.0;
  double margin = 0.0;
};

/// profit = payment - bid_cost, mileage = sum(gC + gD),
/// margin = profit / max(sum piD gD, 1e-12).
PerformanceMetrics performance_metrics(const std::vector<double>& gC, const std::vector<double>& gD,
                                       const DirectionalPrices& prices, double bid_cost);

}  // namespace socdispatch
