#pragma once

// Dense bounded-variable linear programming with full dual information.
//
// Sign convention for multipliers (minimisation):
//   * equality rows     a.x = b        : dual y = dz*/db, free in sign;
//   * range rows   lo <= a.x <= hi     : one net dual y; the lower-side
//     multiplier is max(y, 0) = dz*/dlo >= 0, the upper-side multiplier is
//     max(-y, 0) = -dz*/dhi >= 0;
//   * variable bounds  l <= x <= u     : reduced cost d = c - A^T y; the
//     lower-bound multiplier is max(d, 0), the upper-bound one max(-d, 0).
// Stationarity therefore reads c - A^T y - d = 0 with d split as above.

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace socdispatch::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  std::size_t var;
  double coef;
};

enum class RowKind { equality, range };

struct Row {
  std::string label;
  RowKind kind = RowKind::range;
  std::vector<Term> terms;
  double lower = -kInf;  // right-hand side when kind == equality
  double upper = kInf;
};

struct Variable {
  std::string name;
  double cost = 0.0;
  double lower = 0.0;
  double upper = kInf;
};

class LpProblem {
 public:
  std::size_t add_variable(double cost, double lower, double upper,
                           std::string name = {});
  std::size_t add_equality(std::string label, std::vector<Term> terms,
                           double rhs);
  std::size_t add_range(std::string label, std::vector<Term> terms,
                        double lower, double upper);

  void set_cost(std::size_t var, double cost);
  void set_bounds(std::size_t var, double lower, double upper);
  /// For equality rows `lower` is the right-hand side and `upper` is ignored.
  void set_row_bounds(std::size_t row, double lower, double upper);
  void set_objective_offset(double offset) { offset_ = offset; }

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  double objective_offset() const noexcept { return offset_; }
  std::size_t num_variables() const noexcept { return vars_.size(); }
  std::size_t num_rows() const noexcept { return rows_.size(); }

  std::optional<std::size_t> find_row(std::string_view label) const;

  /// Throws ValidationError on crossed bounds, NaN data, references to
  /// undeclared variables or duplicate / empty labels.
  void validate() const;

 private:
  std::size_t add_row(Row row);

  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::unordered_map<std::string, std::size_t> row_index_;
  double offset_ = 0.0;
};

struct Tolerances {
  double feas = 1e-8;  // absolute primal feasibility
  double comp = 1e-8;  // absolute complementarity
  double gap = 1e-7;   // relative duality gap
};

enum class Status { optimal, infeasible, unbounded };

std::string_view to_string(Status status) noexcept;

struct LpSolution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> row_dual;      // net multiplier per row
  std::vector<double> reduced_cost;  // per structural variable
  std::size_t iterations = 0;
  /// When infeasible: labels of rows left violated by the phase-one optimum.
  std::vector<std::string> infeasible_rows;

  double lower_dual(std::size_t row) const;
  double upper_dual(std::size_t row) const;
  double lower_bound_dual(std::size_t var) const;
  double upper_bound_dual(std::size_t var) const;
  /// Net dual of the row with the given label; throws ContractError when
  /// the label is unknown or the solve was not optimal.
  double dual(const LpProblem& problem, std::string_view label) const;
};

/// Two-phase primal simplex on a dense bounded-variable tableau. Unbounded
/// and infeasible problems are reported through `status`; malformed input
/// raises ValidationError and numerical breakdown SolverError.
LpSolution solve_lp(const LpProblem& problem, const Tolerances& tol = {});

struct OptimalityReport {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double complementarity = 0.0;
  double duality_gap = 0.0;  // |primal - dual objective|

  bool within(const Tolerances& tol, double objective) const;
};

/// Residuals of the primal/dual pair carried by `solution`. Pure
/// computation; the caller decides what is acceptable.
OptimalityReport check_lp_optimality(const LpProblem& problem,
                                     const LpSolution& solution);

}  // namespace socdispatch::lp
