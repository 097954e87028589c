#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "lp_oracle.hpp"
#include "socdispatch/error.hpp"
#include "socdispatch/linprog.hpp"

using namespace socdispatch;
using lp::kInf;

TEST_CASE("box-constrained single variable sits on its lower bound") {
  lp::LpProblem p;
  auto x = p.add_variable(1.0, 0.0, 1.0, "x");
  auto sol = lp::solve_lp(p);
  REQUIRE(sol.status == lp::Status::optimal);
  CHECK(sol.x[x] == 0.0);
  CHECK(sol.objective == 0.0);
  CHECK(sol.lower_bound_dual(x) == doctest::Approx(1.0));
  CHECK(sol.upper_bound_dual(x) == 0.0);
  auto rep = lp::check_lp_optimality(p, sol);
  CHECK(rep.primal_infeasibility == 0.0);
  CHECK(rep.complementarity == 0.0);
  CHECK(rep.duality_gap == 0.0);
}

TEST_CASE("single active upper-side row carries a nonnegative multiplier") {
  lp::LpProblem p;
  auto x = p.add_variable(-1.0, 0.0, kInf, "x");
  p.add_range("cap", {{x, 1.0}}, -kInf, 5.0);
  auto sol = lp::solve_lp(p);
  REQUIRE(sol.status == lp::Status::optimal);
  CHECK(sol.x[x] == doctest::Approx(5.0));
  CHECK(sol.objective == doctest::Approx(-5.0));
  CHECK(sol.upper_dual(0) == doctest::Approx(1.0));
  CHECK(sol.lower_dual(0) == 0.0);
  CHECK(sol.dual(p, "cap") == doctest::Approx(-1.0));
}

TEST_CASE("three-variable equality instance matches vertex enumeration") {
  lp::LpProblem p;
  auto x0 = p.add_variable(2.0, 0.0, 4.0);
  auto x1 = p.add_variable(-1.0, 0.0, 3.0);
  auto x2 = p.add_variable(0.5, 0.0, 5.0);
  p.add_equality("sum", {{x0, 1.0}, {x1, 1.0}, {x2, 1.0}}, 6.0);
  p.add_equality("mix", {{x0, 1.0}, {x1, -2.0}, {x2, 1.0}}, 1.0);
  auto sol = lp::solve_lp(p);
  REQUIRE(sol.status == lp::Status::optimal);
  auto oracle = testing::enumerate_vertices(p);
  REQUIRE(oracle);
  CHECK(sol.objective == doctest::Approx(*oracle).epsilon(1e-12));
  auto rep = lp::check_lp_optimality(p, sol);
  CHECK(rep.within({}, sol.objective));
}

TEST_CASE("equality perturbation moves the optimum by dual times epsilon") {
  lp::LpProblem p;
  auto a = p.add_variable(3.0, 0.0, 10.0);
  auto b = p.add_variable(5.0, 0.0, 10.0);
  auto c = p.add_variable(-1.0, 0.0, 2.0);
  auto row = p.add_equality("demand", {{a, 1.0}, {b, 1.0}, {c, -1.0}}, 12.0);
  auto sol = lp::solve_lp(p);
  REQUIRE(sol.status == lp::Status::optimal);
  const double y = sol.row_dual[row];
  CHECK(y == doctest::Approx(5.0));
  const double eps = 1e-4;
  p.set_row_bounds(row, 12.0 + eps, 12.0 + eps);
  auto up = lp::solve_lp(p);
  CHECK((up.objective - sol.objective) / eps == doctest::Approx(y).epsilon(1e-8));
}

TEST_CASE("infeasible and unbounded problems are classified, not thrown") {
  SUBCASE("infeasible") {
    lp::LpProblem p;
    auto x = p.add_variable(1.0, 0.0, 1.0);
    p.add_equality("too_much", {{x, 1.0}}, 3.0);
    auto sol = lp::solve_lp(p);
    CHECK(sol.status == lp::Status::infeasible);
    REQUIRE(sol.infeasible_rows.size() == 1);
    CHECK(sol.infeasible_rows[0] == "too_much");
  }
  SUBCASE("unbounded") {
    lp::LpProblem p;
    auto x = p.add_variable(-1.0, 0.0, kInf);
    auto y = p.add_variable(0.0, -kInf, kInf);
    p.add_range("link", {{x, 1.0}, {y, -1.0}}, -kInf, 2.0);
    auto sol = lp::solve_lp(p);
    CHECK(sol.status == lp::Status::unbounded);
  }
}

TEST_CASE("malformed problems raise validation errors") {
  SUBCASE("crossed bounds") {
    lp::LpProblem p;
    p.add_variable(0.0, 2.0, 1.0);
    CHECK_THROWS_AS(lp::solve_lp(p), ValidationError);
  }
  SUBCASE("undeclared variable") {
    lp::LpProblem p;
    p.add_variable(0.0, 0.0, 1.0);
    p.add_equality("bad", {{3, 1.0}}, 0.0);
    CHECK_THROWS_AS(lp::solve_lp(p), ValidationError);
  }
  SUBCASE("duplicate label") {
    lp::LpProblem p;
    auto x = p.add_variable(0.0, 0.0, 1.0);
    p.add_equality("row", {{x, 1.0}}, 0.0);
    CHECK_THROWS_AS(p.add_range("row", {{x, 1.0}}, 0.0, 1.0), ValidationError);
  }
}

TEST_CASE("Beale's cycling example terminates at the optimum") {
  lp::LpProblem p;
  auto x4 = p.add_variable(-0.75, 0.0, kInf);
  auto x5 = p.add_variable(20.0, 0.0, kInf);
  auto x6 = p.add_variable(-0.5, 0.0, kInf);
  auto x7 = p.add_variable(6.0, 0.0, kInf);
  p.add_range("r1", {{x4, 0.25}, {x5, -8.0}, {x6, -1.0}, {x7, 9.0}}, -kInf, 0.0);
  p.add_range("r2", {{x4, 0.5}, {x5, -12.0}, {x6, -0.5}, {x7, 3.0}}, -kInf, 0.0);
  p.add_range("r3", {{x6, 1.0}}, -kInf, 1.0);
  auto sol = lp::solve_lp(p);
  REQUIRE(sol.status == lp::Status::optimal);
  CHECK(sol.objective == doctest::Approx(-1.25));
}

TEST_CASE("free variables and redundant equalities") {
  lp::LpProblem p;
  auto x = p.add_variable(1.0, -kInf, kInf);
  auto y = p.add_variable(1.0, 0.0, 4.0);
  p.add_equality("a", {{x, 1.0}, {y, 1.0}}, 3.0);
  p.add_equality("a_twice", {{x, 2.0}, {y, 2.0}}, 6.0);
  p.add_range("floor", {{x, 1.0}}, -2.0, kInf);
  auto sol = lp::solve_lp(p);
  REQUIRE(sol.status == lp::Status::optimal);
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(lp::check_lp_optimality(p, sol).within({}, sol.objective));
}

TEST_CASE("perturbed primal on an equality shows up as primal residual") {
  lp::LpProblem p;
  auto x = p.add_variable(1.0, 0.0, 10.0);
  auto y = p.add_variable(2.0, 0.0, 10.0);
  p.add_equality("sum", {{x, 1.0}, {y, 1.0}}, 4.0);
  auto sol = lp::solve_lp(p);
  REQUIRE(sol.status == lp::Status::optimal);
  CHECK(lp::check_lp_optimality(p, sol).primal_infeasibility == 0.0);
  sol.x[x] += 1e-3;
  CHECK(lp::check_lp_optimality(p, sol).primal_infeasibility == doctest::Approx(1e-3));
}

namespace {

lp::LpProblem random_lp(std::mt19937_64& rng, std::size_t nvars, std::size_t neq,
                        std::size_t nrange) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> ub(0.5, 5.0);
  std::uniform_int_distribution<int> coin(0, 1);
  lp::LpProblem p;
  std::vector<double> feasible(nvars);
  for (std::size_t j = 0; j < nvars; ++j) {
    const double u = ub(rng);
    p.add_variable(coef(rng), 0.0, u);
    feasible[j] = u * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  auto row_terms = [&](double& activity) {
    std::vector<lp::Term> terms;
    activity = 0.0;
    for (std::size_t j = 0; j < nvars; ++j) {
      if (coin(rng) == 0) continue;
      const double c = std::round(coef(rng) * 4.0) / 4.0;
      terms.push_back({j, c});
      activity += c * feasible[j];
    }
    return terms;
  };
  for (std::size_t i = 0; i < neq; ++i) {
    double act = 0.0;
    auto terms = row_terms(act);
    p.add_equality("eq" + std::to_string(i), std::move(terms), act);
  }
  for (std::size_t i = 0; i < nrange; ++i) {
    double act = 0.0;
    auto terms = row_terms(act);
    const double lo = coin(rng) ? act - ub(rng) : -kInf;
    const double hi = coin(rng) ? act + ub(rng) : kInf;
    p.add_range("rg" + std::to_string(i), std::move(terms), lo, hi);
  }
  return p;
}

}  // namespace

TEST_CASE("randomised small LPs: residuals, strong duality, vertex oracle") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = random_lp(rng, 4, 1 + trial % 2, 1 + trial % 3);
    auto sol = lp::solve_lp(p);
    REQUIRE(sol.status == lp::Status::optimal);
    auto rep = lp::check_lp_optimality(p, sol);
    CHECK(rep.primal_infeasibility <= 1e-8);
    CHECK(rep.dual_infeasibility <= 1e-8);
    CHECK(rep.complementarity <= 1e-8);
    CHECK(std::abs(sol.objective - sol.dual_objective) <= 1e-7 * (1.0 + std::abs(sol.objective)));
    auto oracle = testing::enumerate_vertices(p);
    REQUIRE(oracle);
    CHECK(sol.objective == doctest::Approx(*oracle).epsilon(1e-9));
  }
}

TEST_CASE("repeated solves are bit-identical") {
  std::mt19937_64 rng(7);
  auto p = random_lp(rng, 6, 2, 3);
  auto a = lp::solve_lp(p);
  auto b = lp::solve_lp(p);
  REQUIRE(a.status == lp::Status::optimal);
  REQUIRE(a.x.size() == b.x.size());
  CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.row_dual.data(), b.row_dual.data(), a.row_dual.size() * sizeof(double)) == 0);
}
