#include "socdispatch/linprog.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "socdispatch/error.hpp"

namespace socdispatch::lp {

// ---------------------------------------------------------------------------
// LpProblem

std::size_t LpProblem::add_variable(double cost, double lower, double upper,
                                    std::string name) {
  vars_.push_back(Variable{std::move(name), cost, lower, upper});
  return vars_.size() - 1;
}

std::size_t LpProblem::add_row(Row row) {
  if (row.label.empty()) throw ValidationError("constraint label must not be empty");
  auto [it, inserted] = row_index_.emplace(row.label, rows_.size());
  if (!inserted) throw ValidationError("duplicate constraint label '" + row.label + "'");
  rows_.push_back(std::move(row));
  return rows_.size() - 1;
}

std::size_t LpProblem::add_equality(std::string label, std::vector<Term> terms,
                                    double rhs) {
  return add_row(Row{std::move(label), RowKind::equality, std::move(terms), rhs, rhs});
}

std::size_t LpProblem::add_range(std::string label, std::vector<Term> terms,
                                 double lower, double upper) {
  return add_row(Row{std::move(label), RowKind::range, std::move(terms), lower, upper});
}

void LpProblem::set_cost(std::size_t var, double cost) { vars_.at(var).cost = cost; }

void LpProblem::set_bounds(std::size_t var, double lower, double upper) {
  auto& v = vars_.at(var);
  v.lower = lower;
  v.upper = upper;
}

void LpProblem::set_row_bounds(std::size_t row, double lower, double upper) {
  auto& r = rows_.at(row);
  r.lower = lower;
  r.upper = r.kind == RowKind::equality ? lower : upper;
}

std::optional<std::size_t> LpProblem::find_row(std::string_view label) const {
  auto it = row_index_.find(std::string(label));
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

void LpProblem::validate() const {
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    if (std::isnan(v.cost) || std::isinf(v.cost) || std::isnan(v.lower) ||
        std::isnan(v.upper))
      throw ValidationError("variable " + std::to_string(j) + " has non-finite data");
    if (v.lower > v.upper)
      throw ValidationError("variable " + std::to_string(j) + " has lower > upper");
    if (v.lower == kInf || v.upper == -kInf)
      throw ValidationError("variable " + std::to_string(j) + " has an empty domain");
  }
  for (const auto& r : rows_) {
    if (std::isnan(r.lower) || std::isnan(r.upper))
      throw ValidationError("row '" + r.label + "' has NaN limits");
    if (r.kind == RowKind::equality && !std::isfinite(r.lower))
      throw ValidationError("equality row '" + r.label + "' needs a finite right-hand side");
    if (r.lower > r.upper) throw ValidationError("row '" + r.label + "' has lower > upper");
    for (const auto& t : r.terms) {
      if (t.var >= vars_.size())
        throw ValidationError("row '" + r.label + "' references undeclared variable " +
                              std::to_string(t.var));
      if (!std::isfinite(t.coef))
        throw ValidationError("row '" + r.label + "' has a non-finite coefficient");
    }
  }
  if (!std::isfinite(offset_)) throw ValidationError("objective offset is not finite");
}

// ---------------------------------------------------------------------------
// LpSolution

std::string_view to_string(Status status) noexcept {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "unknown";
}

double LpSolution::lower_dual(std::size_t row) const { return std::max(row_dual.at(row), 0.0); }
double LpSolution::upper_dual(std::size_t row) const { return std::max(-row_dual.at(row), 0.0); }
double LpSolution::lower_bound_dual(std::size_t var) const {
  return std::max(reduced_cost.at(var), 0.0);
}
double LpSolution::upper_bound_dual(std::size_t var) const {
  return std::max(-reduced_cost.at(var), 0.0);
}

double LpSolution::dual(const LpProblem& problem, std::string_view label) const {
  if (status != Status::optimal) throw ContractError("duals requested from a non-optimal solve");
  auto row = problem.find_row(label);
  if (!row) throw ContractError("unknown constraint label '" + std::string(label) + "'");
  return row_dual.at(*row);
}

bool OptimalityReport::within(const Tolerances& tol, double objective) const {
  return primal_infeasibility <= tol.feas && dual_infeasibility <= tol.feas &&
         complementarity <= tol.comp &&
         duality_gap <= tol.gap * (1.0 + std::abs(objective));
}

// ---------------------------------------------------------------------------
// Simplex

namespace {

enum class State : unsigned char { basic, at_lower, at_upper, free_zero };

constexpr double kOptTol = 1e-9;     // reduced-cost optimality
constexpr double kPivotTol = 1e-9;   // smallest admissible pivot magnitude
constexpr double kDegenerate = 1e-12;
constexpr std::size_t kBlandAfter = 25;      // degenerate pivots before Bland
constexpr std::size_t kRefactorEvery = 40;

// Computational form: A' x' = b with x' = (structural, range slacks,
// artificials). Range row i becomes a.x - s_i = 0 with lo_i <= s_i <= hi_i.
class Simplex {
 public:
  Simplex(const LpProblem& problem, const Tolerances& tol);
  LpSolution run();

 private:
  std::size_t artificial(std::size_t row) const { return n_ + r_ + row; }
  bool is_artificial(std::size_t j) const { return j >= n_ + r_; }

  double dot_column(const Eigen::VectorXd& y, std::size_t j) const;
  Eigen::VectorXd column(std::size_t j) const;
  void refactor();
  void recompute_basics();
  // Returns false on unboundedness.
  bool optimise(const std::vector<double>& cost);
  void drive_out_artificials();
  [[noreturn]] void fail(const std::string& what) const {
    throw SolverError(what, iterations_);
  }

  const LpProblem& problem_;
  Tolerances tol_;
  std::size_t m_ = 0, n_ = 0, r_ = 0, total_ = 0;
  Eigen::MatrixXd a_;  // m x (n + r)
  Eigen::VectorXd b_;
  std::vector<double> lo_, hi_, sigma_;
  std::vector<double> x_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_;
  Eigen::MatrixXd binv_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t max_iterations_ = 0;
};

Simplex::Simplex(const LpProblem& problem, const Tolerances& tol)
    : problem_(problem), tol_(tol) {
  const auto& rows = problem.rows();
  const auto& vars = problem.variables();
  m_ = rows.size();
  n_ = vars.size();
  for (const auto& row : rows)
    if (row.kind == RowKind::range) ++r_;
  total_ = n_ + r_ + m_;

  a_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_ + r_));
  b_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  lo_.assign(total_, 0.0);
  hi_.assign(total_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    lo_[j] = vars[j].lower;
    hi_[j] = vars[j].upper;
  }
  std::size_t slack = n_;
  for (std::size_t i = 0; i < m_; ++i) {
    const auto& row = rows[i];
    const auto ii = static_cast<Eigen::Index>(i);
    for (const auto& t : row.terms) a_(ii, static_cast<Eigen::Index>(t.var)) += t.coef;
    if (row.kind == RowKind::equality) {
      b_(ii) = row.lower;
    } else {
      a_(ii, static_cast<Eigen::Index>(slack)) = -1.0;
      lo_[slack] = row.lower;
      hi_[slack] = row.upper;
      ++slack;
    }
  }
  for (std::size_t i = 0; i < m_; ++i) {
    lo_[artificial(i)] = 0.0;
    hi_[artificial(i)] = kInf;
  }
  max_iterations_ = 200 * (m_ + n_ + r_) + 1000;
}

double Simplex::dot_column(const Eigen::VectorXd& y, std::size_t j) const {
  if (is_artificial(j)) {
    const std::size_t i = j - n_ - r_;
    return sigma_[i] * y(static_cast<Eigen::Index>(i));
  }
  return y.dot(a_.col(static_cast<Eigen::Index>(j)));
}

Eigen::VectorXd Simplex::column(std::size_t j) const {
  if (is_artificial(j)) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    const std::size_t i = j - n_ - r_;
    e(static_cast<Eigen::Index>(i)) = sigma_[i];
    return e;
  }
  return a_.col(static_cast<Eigen::Index>(j));
}

void Simplex::refactor() {
  const auto m = static_cast<Eigen::Index>(m_);
  if (m == 0) return;
  Eigen::MatrixXd basis_matrix(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    basis_matrix.col(p) = column(basis_[static_cast<std::size_t>(p)]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
  lu.setThreshold(1e-11);
  if (!lu.isInvertible()) fail("singular basis during refactorisation");
  binv_ = lu.inverse();
  since_refactor_ = 0;
}

void Simplex::recompute_basics() {
  if (m_ == 0) return;
  Eigen::VectorXd rhs = b_;
  for (std::size_t j = 0; j < total_; ++j) {
    if (state_[j] == State::basic || x_[j] == 0.0) continue;
    rhs -= column(j) * x_[j];
  }
  Eigen::VectorXd xb = binv_ * rhs;
  for (std::size_t p = 0; p < m_; ++p) x_[basis_[p]] = xb(static_cast<Eigen::Index>(p));
}

bool Simplex::optimise(const std::vector<double>& cost) {
  const auto m = static_cast<Eigen::Index>(m_);
  Eigen::VectorXd cb(m);
  std::size_t degenerate_streak = 0;
  bool bland = false;

  for (;;) {
    if (iterations_ >= max_iterations_) fail("iteration limit reached");
    if (since_refactor_ >= kRefactorEvery) {
      refactor();
      recompute_basics();
    }

    for (Eigen::Index p = 0; p < m; ++p) cb(p) = cost[basis_[static_cast<std::size_t>(p)]];
    const Eigen::VectorXd y = binv_.transpose() * cb;

    // Pricing.
    std::size_t entering = total_;
    double best = 0.0;
    double entering_d = 0.0;
    for (std::size_t j = 0; j < total_; ++j) {
      const State s = state_[j];
      if (s == State::basic || lo_[j] == hi_[j]) continue;
      const double d = cost[j] - dot_column(y, j);
      bool eligible = false;
      switch (s) {
        case State::at_lower: eligible = d < -kOptTol; break;
        case State::at_upper: eligible = d > kOptTol; break;
        case State::free_zero: eligible = std::abs(d) > kOptTol; break;
        case State::basic: break;
      }
      if (!eligible) continue;
      if (bland) {
        entering = j;
        entering_d = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        entering_d = d;
      }
    }
    if (entering == total_) return true;

    const double dir = entering_d < 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd alpha = binv_ * column(entering);

    // Ratio test. Basic p moves by delta_p = -dir * alpha_p per unit step.
    double theta = hi_[entering] - lo_[entering];  // bound flip
    if (!std::isfinite(theta)) theta = kInf;
    double min_ratio = kInf;
    for (std::size_t p = 0; p < m_; ++p) {
      const double delta = -dir * alpha(static_cast<Eigen::Index>(p));
      const std::size_t j = basis_[p];
      double ratio = kInf;
      if (delta < -kPivotTol && std::isfinite(lo_[j])) {
        ratio = (x_[j] - lo_[j]) / -delta;
      } else if (delta > kPivotTol && std::isfinite(hi_[j])) {
        ratio = (hi_[j] - x_[j]) / delta;
      }
      min_ratio = std::min(min_ratio, std::max(ratio, 0.0));
    }
    std::size_t leaving = m_;
    if (min_ratio < theta) {
      const double slack = kDegenerate + 1e-12 * std::abs(min_ratio);
      double best_pivot = 0.0;
      std::size_t best_col = total_;
      for (std::size_t p = 0; p < m_; ++p) {
        const double delta = -dir * alpha(static_cast<Eigen::Index>(p));
        const std::size_t j = basis_[p];
        double ratio = kInf;
        if (delta < -kPivotTol && std::isfinite(lo_[j])) {
          ratio = (x_[j] - lo_[j]) / -delta;
        } else if (delta > kPivotTol && std::isfinite(hi_[j])) {
          ratio = (hi_[j] - x_[j]) / delta;
        }
        if (std::max(ratio, 0.0) > min_ratio + slack) continue;
        const double mag = std::abs(delta);
        // Bland: smallest column index; otherwise largest pivot, then index.
        const bool take = bland ? j < best_col
                                : (mag > best_pivot * (1.0 + 1e-9) ||
                                   (mag >= best_pivot * (1.0 - 1e-9) && j < best_col));
        if (take) {
          best_pivot = mag;
          best_col = j;
          leaving = p;
        }
      }
      theta = min_ratio;
    }
    if (!std::isfinite(theta)) return false;

    ++iterations_;
    ++since_refactor_;
    if (theta <= kDegenerate) {
      if (++degenerate_streak >= kBlandAfter) bland = true;
    } else {
      degenerate_streak = 0;
      bland = false;
    }

    // Update primal values.
    x_[entering] += dir * theta;
    for (std::size_t p = 0; p < m_; ++p)
      x_[basis_[p]] += -dir * alpha(static_cast<Eigen::Index>(p)) * theta;

    if (leaving == m_) {
      // Bound flip; basis unchanged.
      if (dir > 0) {
        state_[entering] = State::at_upper;
        x_[entering] = hi_[entering];
      } else {
        state_[entering] = State::at_lower;
        x_[entering] = lo_[entering];
      }
      continue;
    }

    const std::size_t out = basis_[leaving];
    const double delta_out = -dir * alpha(static_cast<Eigen::Index>(leaving));
    if (delta_out < 0.0) {
      state_[out] = State::at_lower;
      x_[out] = lo_[out];
    } else {
      state_[out] = State::at_upper;
      x_[out] = hi_[out];
    }
    state_[entering] = State::basic;
    basis_[leaving] = entering;

    // Product-form update of the explicit inverse.
    const auto l = static_cast<Eigen::Index>(leaving);
    const double pivot = alpha(l);
    if (std::abs(pivot) < kPivotTol) fail("pivot element vanished");
    binv_.row(l) /= pivot;
    for (Eigen::Index p = 0; p < m; ++p) {
      if (p == l || alpha(p) == 0.0) continue;
      binv_.row(p) -= alpha(p) * binv_.row(l);
    }
  }
}

void Simplex::drive_out_artificials() {
  for (std::size_t p = 0; p < m_; ++p) {
    if (!is_artificial(basis_[p])) continue;
    const Eigen::VectorXd row = binv_.row(static_cast<Eigen::Index>(p));
    std::size_t best = total_;
    double best_mag = 1e-7;
    for (std::size_t j = 0; j < n_ + r_; ++j) {
      if (state_[j] == State::basic) continue;
      const double mag = std::abs(row.dot(a_.col(static_cast<Eigen::Index>(j))));
      if (mag > best_mag) {
        best_mag = mag;
        best = j;
      }
    }
    if (best == total_) continue;  // redundant row; artificial stays basic at 0
    const Eigen::VectorXd alpha = binv_ * column(best);
    const std::size_t out = basis_[p];
    state_[out] = State::at_lower;
    x_[out] = 0.0;
    state_[best] = State::basic;
    basis_[p] = best;
    const auto l = static_cast<Eigen::Index>(p);
    binv_.row(l) /= alpha(l);
    for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(m_); ++q) {
      if (q == l || alpha(q) == 0.0) continue;
      binv_.row(q) -= alpha(q) * binv_.row(l);
    }
    ++since_refactor_;
  }
  refactor();
  recompute_basics();
}

LpSolution Simplex::run() {
  LpSolution out;
  x_.assign(total_, 0.0);
  state_.assign(total_, State::at_lower);
  sigma_.assign(m_, 1.0);

  for (std::size_t j = 0; j < n_ + r_; ++j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
      state_[j] = State::at_lower;
    } else if (std::isfinite(hi_[j])) {
      x_[j] = hi_[j];
      state_[j] = State::at_upper;
    } else {
      x_[j] = 0.0;
      state_[j] = State::free_zero;
    }
  }
  Eigen::VectorXd residual = b_;
  for (std::size_t j = 0; j < n_ + r_; ++j)
    if (x_[j] != 0.0) residual -= a_.col(static_cast<Eigen::Index>(j)) * x_[j];

  basis_.resize(m_);
  binv_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
  for (std::size_t i = 0; i < m_; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    sigma_[i] = residual(ii) >= 0.0 ? 1.0 : -1.0;
    basis_[i] = artificial(i);
    state_[artificial(i)] = State::basic;
    x_[artificial(i)] = std::abs(residual(ii));
    binv_(ii, ii) = sigma_[i];
  }

  // Phase one: minimise the sum of artificials.
  std::vector<double> cost(total_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) cost[artificial(i)] = 1.0;
  optimise(cost);
  refactor();
  recompute_basics();

  double infeasibility = 0.0;
  for (std::size_t i = 0; i < m_; ++i) infeasibility += std::max(x_[artificial(i)], 0.0);
  const double scale = 1.0 + (m_ ? b_.lpNorm<Eigen::Infinity>() : 0.0);
  if (infeasibility > tol_.feas * scale) {
    out.status = Status::infeasible;
    out.iterations = iterations_;
    for (std::size_t i = 0; i < m_; ++i)
      if (x_[artificial(i)] > tol_.feas) out.infeasible_rows.push_back(problem_.rows()[i].label);
    return out;
  }

  drive_out_artificials();
  for (std::size_t i = 0; i < m_; ++i) {
    hi_[artificial(i)] = 0.0;
    if (state_[artificial(i)] != State::basic) x_[artificial(i)] = 0.0;
  }

  // Phase two.
  std::fill(cost.begin(), cost.end(), 0.0);
  for (std::size_t j = 0; j < n_; ++j) cost[j] = problem_.variables()[j].cost;
  const bool bounded = optimise(cost);
  out.iterations = iterations_;
  if (!bounded) {
    out.status = Status::unbounded;
    return out;
  }
  refactor();
  recompute_basics();

  const auto m = static_cast<Eigen::Index>(m_);
  Eigen::VectorXd cb(m);
  for (Eigen::Index p = 0; p < m; ++p) cb(p) = cost[basis_[static_cast<std::size_t>(p)]];
  const Eigen::VectorXd y = m_ ? Eigen::VectorXd(binv_.transpose() * cb) : Eigen::VectorXd();

  out.status = Status::optimal;
  out.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  out.row_dual.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) out.row_dual[i] = y(static_cast<Eigen::Index>(i));
  out.reduced_cost.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    out.reduced_cost[j] = state_[j] == State::basic ? 0.0 : cost[j] - dot_column(y, j);
  }
  double obj = problem_.objective_offset();
  for (std::size_t j = 0; j < n_; ++j) obj += problem_.variables()[j].cost * out.x[j];
  out.objective = obj;
  {
    double dual = problem_.objective_offset();
    const auto& rows = problem_.rows();
    for (std::size_t i = 0; i < m_; ++i) {
      const double yi = out.row_dual[i];
      if (rows[i].kind == RowKind::equality) {
        dual += yi * rows[i].lower;
      } else {
        if (yi > 0.0 && std::isfinite(rows[i].lower)) dual += yi * rows[i].lower;
        if (yi < 0.0 && std::isfinite(rows[i].upper)) dual += yi * rows[i].upper;
      }
    }
    const auto& vars = problem_.variables();
    for (std::size_t j = 0; j < n_; ++j) {
      const double d = out.reduced_cost[j];
      if (d > 0.0 && std::isfinite(vars[j].lower)) dual += d * vars[j].lower;
      if (d < 0.0 && std::isfinite(vars[j].upper)) dual += d * vars[j].upper;
    }
    out.dual_objective = dual;
  }
  return out;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const Tolerances& tol) {
  problem.validate();
  Simplex simplex(problem, tol);
  return simplex.run();
}

OptimalityReport check_lp_optimality(const LpProblem& problem, const LpSolution& solution) {
  OptimalityReport rep;
  const auto& vars = problem.variables();
  const auto& rows = problem.rows();
  if (solution.x.size() != vars.size() || solution.row_dual.size() != rows.size() ||
      solution.reduced_cost.size() != vars.size())
    throw ContractError("solution dimensions do not match the problem");

  const auto& x = solution.x;
  double primal_obj = problem.objective_offset();
  double dual_obj = problem.objective_offset();

  // Stationarity: c - A^T y - d = 0, checked through the recomputed d.
  std::vector<double> d(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    d[j] = vars[j].cost;
    primal_obj += vars[j].cost * x[j];
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const double y = solution.row_dual[i];
    double activity = 0.0;
    for (const auto& t : row.terms) {
      activity += t.coef * x[t.var];
      d[t.var] -= y * t.coef;
    }
    if (row.kind == RowKind::equality) {
      rep.primal_infeasibility = std::max(rep.primal_infeasibility, std::abs(activity - row.lower));
      dual_obj += y * row.lower;
      continue;
    }
    rep.primal_infeasibility = std::max(rep.primal_infeasibility, row.lower - activity);
    rep.primal_infeasibility = std::max(rep.primal_infeasibility, activity - row.upper);
    const double lo_mult = std::max(y, 0.0);
    const double up_mult = std::max(-y, 0.0);
    if (std::isfinite(row.lower)) {
      rep.complementarity = std::max(rep.complementarity, std::abs(lo_mult * (activity - row.lower)));
      dual_obj += lo_mult * row.lower;
    } else {
      rep.dual_infeasibility = std::max(rep.dual_infeasibility, lo_mult);
    }
    if (std::isfinite(row.upper)) {
      rep.complementarity = std::max(rep.complementarity, std::abs(up_mult * (row.upper - activity)));
      dual_obj -= up_mult * row.upper;
    } else {
      rep.dual_infeasibility = std::max(rep.dual_infeasibility, up_mult);
    }
  }

  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    rep.primal_infeasibility = std::max(rep.primal_infeasibility, v.lower - x[j]);
    rep.primal_infeasibility = std::max(rep.primal_infeasibility, x[j] - v.upper);
    // The reported reduced cost must agree with c - A^T y.
    rep.dual_infeasibility =
        std::max(rep.dual_infeasibility, std::abs(d[j] - solution.reduced_cost[j]));
    const double lo_mult = std::max(d[j], 0.0);
    const double up_mult = std::max(-d[j], 0.0);
    if (std::isfinite(v.lower)) {
      rep.complementarity = std::max(rep.complementarity, std::abs(lo_mult * (x[j] - v.lower)));
      dual_obj += lo_mult * v.lower;
    } else {
      rep.dual_infeasibility = std::max(rep.dual_infeasibility, lo_mult);
    }
    if (std::isfinite(v.upper)) {
      rep.complementarity = std::max(rep.complementarity, std::abs(up_mult * (v.upper - x[j])));
      dual_obj -= up_mult * v.upper;
    } else {
      rep.dual_infeasibility = std::max(rep.dual_infeasibility, up_mult);
    }
  }
  rep.primal_infeasibility = std::max(rep.primal_infeasibility, 0.0);
  rep.duality_gap = std::abs(primal_obj - dual_obj);
  return rep;
}

}  // namespace socdispatch::lp
