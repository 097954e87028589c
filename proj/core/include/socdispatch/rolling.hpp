#pragma once

// Rolling-window look-ahead dispatch with binding-interval prices.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "socdispatch/dispatch.hpp"
#include "socdispatch/pricing.hpp"

namespace socdispatch {

enum class ForecastProvenance { exact, perturbed, supplied };

struct ForecastSet {
  std::size_t W = 1;
  /// windows[t] covers intervals t .. min(t+W, T)-1 (0-based).
  std::vector<std::vector<double>> windows;
  ForecastProvenance provenance = ForecastProvenance::exact;

  /// Window lengths match truncation and every value is finite.
  void validate(std::size_t T) const;
};

/// Errors applied to advisory slots only; lead k >= 1 is the k-th slot after
/// the binding one. A deterministic term (offsets[k-1], repeating the last
/// entry for longer leads) plus seeded Gaussian noise of width `sigma`.
struct ForecastError {
  enum class Kind { none, additive, multiplicative };
  Kind kind = Kind::none;
  std::vector<double> offsets;
  double sigma = 0.0;
};

ForecastSet make_forecasts(const Scenario& scenario, std::size_t W, const ForecastError& error = {},
                           unsigned long long seed = 0);

struct RollingFailure {
  std::size_t window = 0;  // 0-based start interval
  std::string message;
  std::vector<std::string> details;
};

struct RollingResult {
  std::size_t W = 1;
  CostMode mode = CostMode::epigraph;
  std::vector<DispatchSolution> windows;
  /// Implemented dispatch per storage; `e` is the realized SoC path. Holds
  /// only intervals that were cleared when the run failed.
  std::vector<StorageDispatch> binding;
  std::vector<double> lambda;               // R-LMP
  std::vector<DirectionalPrices> tlmp;      // R-TLMP, aligned with binding
  std::vector<std::optional<std::size_t>> gamma;  // end segment per storage
  double objective = 0.0;  // bid cost of the binding dispatch over the horizon
  std::optional<RollingFailure> failure;

  bool complete() const noexcept { return !failure; }
};

/// Clears each window in turn from the realized SoC and the previous binding
/// power. In end-segment mode every window ends in the unit's segment unless
/// scenario.options.gamma_final_window_only, in which case only windows
/// reaching the horizon do and the rest use the epigraph cost.
RollingResult rolling_dispatch(const Scenario& scenario, const ForecastSet& forecasts,
                               CostMode mode = CostMode::epigraph);

PriceSchedule r_lmp(const RollingResult& result);
PriceSchedule r_tlmp(const RollingResult& result);

struct RollingLocAudit {
  RollingResult run;
  LocReport r_lmp;
  LocReport r_tlmp;
};

/// LOC of the binding dispatch under R-LMP and R-TLMP with Q over the whole
/// horizon, using the run's end segments and cost form.
RollingLocAudit rolling_loc_audit(const Scenario& scenario, const ForecastSet& forecasts,
                                  CostMode mode = CostMode::epigraph);

}  // namespace socdispatch
