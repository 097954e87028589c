#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace socdispatch {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: inconsistent lengths, bad bounds, duplicate labels.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the domain an operation is defined on (e.g. SoC
/// outside the bid's breakpoints).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The input is well-formed but violates an operation precondition
/// (non-EDCR bid in epigraph mode, missing end segment, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A result lacks data the caller relies on (e.g. duals of an oracle solve).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds a configured guard rail.
class GuardRailError : public Error {
 public:
  using Error::Error;
};

/// The simplex iteration broke down (singular basis, iteration limit).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::size_t iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

/// A clearing or self-scheduling problem has no feasible point. `details`
/// names the intervals or constraint rows implicated.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::string> details)
      : Error(compose(what, details)), details_(std::move(details)) {}

  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  static std::string compose(const std::string& what,
                             const std::vector<std::string>& details) {
    std::string msg = what;
    for (const auto& d : details) msg += "; " + d;
    return msg;
  }

  std::vector<std::string> details_;
};

}  // namespace socdispatch
