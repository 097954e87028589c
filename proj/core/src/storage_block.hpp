#pragma once

// Constraint block of a single storage over a horizon, shared by the market
// clearing problem and the individual profit-maximization problem.

#include <optional>
#include <vector>

#include "socdispatch/dispatch.hpp"
#include "socdispatch/linprog.hpp"

namespace socdispatch::detail {

/// Adds gC, gD, e (and theta in epigraph mode) variables, SoC transition and
/// ramp rows, and the bid cost. In end-segment mode `gamma` is required and a
/// terminal row confines e[T] to that segment.
StorageLayout add_storage_block(lp::LpProblem& problem, const StorageUnit& unit, std::size_t T,
                                CostMode mode, std::optional<std::size_t> gamma);

StorageDispatch read_storage(const lp::LpSolution& solution, const StorageLayout& layout,
                             const StorageUnit& unit, std::size_t T, CostMode mode,
                             bool with_duals);

/// Appends stationarity and complementarity residuals of one storage given the
/// per-interval prices it faces in each direction.
void storage_kkt(const StorageUnit& unit, const StorageDispatch& d,
                 const std::vector<double>& priceC, const std::vector<double>& priceD,
                 KktReport& report);

/// Delta_t = (mu_hi - mu_lo)[t+1] - (mu_hi - mu_lo)[t], zero beyond the horizon.
std::vector<double> ramp_price(const std::vector<double>& lo, const std::vector<double>& hi);

std::string row_label(const char* family, const std::string& id, std::size_t index);

}  // namespace socdispatch::detail
