#include <cmath>

#include "doctest.h"
#include "random_bids.hpp"
#include "socdispatch/bids.hpp"
#include "socdispatch/error.hpp"

using namespace socdispatch;

namespace {

SocBid bid_a() { return {{0, 5, 10}, {10, 8}, {15, 13}, 1.0, 1.0}; }
SocBid bid_b() { return {{0, 5, 10}, {10, 8}, {15, 14}, 1.0, 1.0}; }

double max_price(const SocBid& b) {
  double m = 0.0;
  for (double c : b.cC) m = std::max(m, std::abs(c) / b.etaC);
  for (double c : b.cD) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("validate_bid") {
  CHECK(validate_bid(bid_a()).ok);
  CHECK(validate_bid(bid_b()).ok);

  auto rising = bid_a();
  rising.cC = {8, 10};
  auto v = validate_bid(rising);
  CHECK_FALSE(v.ok);
  REQUIRE(v.violations.size() == 1);
  CHECK(v.violations[0] == "cC not non-increasing at k=1");

  auto narrow = bid_a();
  narrow.cC = {14, 14};
  narrow.cD = {13, 13};
  v = validate_bid(narrow);
  CHECK_FALSE(v.ok);
  REQUIRE(v.violations.size() == 1);
  CHECK(v.violations[0].find("spread") != std::string::npos);

  auto lossy = bid_a();
  lossy.etaD = 1.2;
  CHECK_FALSE(validate_bid(lossy).ok);

  auto bad = bid_a();
  bad.cD = {15};
  CHECK_THROWS_AS(validate_bid(bad), ValidationError);
}

TEST_CASE("segment_of uses half-open segments with a closed top") {
  CHECK(segment_of(bid_a(), 2.0) == 0);
  CHECK(segment_of(bid_a(), 5.0) == 1);
  CHECK(segment_of(bid_a(), 10.0) == 1);
  CHECK(segment_of(bid_a(), 0.0) == 0);
  CHECK_THROWS_AS(segment_of(bid_a(), 10.5), DomainError);
  CHECK_THROWS_AS(segment_of(bid_a(), -0.1), DomainError);
}

TEST_CASE("is_edcr") {
  auto a = is_edcr(bid_a());
  CHECK(a.edcr);
  REQUIRE(a.ratios.size() == 1);
  CHECK(a.ratios[0] == doctest::Approx(1.0));

  auto b = is_edcr(bid_b());
  CHECK_FALSE(b.edcr);
  CHECK(b.ratios[0] == doctest::Approx(2.0));
  REQUIRE(b.violations.size() == 1);
  CHECK(b.violations[0] == 1);

  CHECK(is_edcr(SocBid{{0, 10}, {10}, {13}, 1, 1}).edcr);

  SocBid flat{{0, 5, 10}, {10, 8}, {15, 15}, 1, 1};
  auto f = is_edcr(flat);
  CHECK_FALSE(f.edcr);
  CHECK(std::isnan(f.ratios[0]));
}

TEST_CASE("stage cost fixtures") {
  const auto a = bid_a();
  CHECK(charge_cost(a, 2, 2) == doctest::Approx(20));
  CHECK(charge_cost(a, 4, 3) == doctest::Approx(26));
  CHECK(charge_cost(a, 5, 2) == doctest::Approx(16));
  CHECK(discharge_cost(a, 7, 1) == doctest::Approx(13));
  CHECK(discharge_cost(a, 7, 4) == doctest::Approx(56));
  CHECK(discharge_cost(a, 5, 5) == doctest::Approx(75));
  CHECK(stage_cost(a, 4, 3, 0) == doctest::Approx(-26));
  CHECK(stage_cost(a, 7, 0, 4) == doctest::Approx(56));
  CHECK(stage_cost(a, 4, 0, 0) == 0.0);
  CHECK_THROWS_AS(stage_cost(a, 4, 1, 1), DomainError);
  CHECK_THROWS_AS(charge_cost(a, 8, 3), DomainError);
  CHECK_THROWS_AS(discharge_cost(a, 2, 3), DomainError);
}

TEST_CASE("trajectory and closed-form fixtures") {
  const auto a = bid_a();
  CHECK(trajectory_cost(a, 4, {3, 0}, {0, 1}) == doctest::Approx(-13));
  CHECK(trajectory_cost(a, 4, {0, 0}, {0, 0}) == 0.0);
  CHECK(trajectory_cost(a, 4, {1, 0}, {0, 1}) == doctest::Approx(5));
  CHECK_THROWS_WITH_AS(trajectory_cost(a, 4, {3, 5}, {0, 0}),
                       doctest::Contains("t=2"), DomainError);

  auto c = edcr_closed_form_cost(a, 4, {3, 0}, {0, 1});
  CHECK(c.max_form == doctest::Approx(-13));
  CHECK(c.case_form == doctest::Approx(-13));
  CHECK(c.end_segment == 1);
  c = edcr_closed_form_cost(a, 4, {0, 0}, {0, 0});
  CHECK(c.max_form == doctest::Approx(0));
  CHECK(c.case_form == 0.0);
  c = edcr_closed_form_cost(a, 7, {0, 0}, {4, 0});
  CHECK(c.max_form == doctest::Approx(56));
  CHECK(c.case_form == doctest::Approx(56));
  CHECK_THROWS_AS(edcr_closed_form_cost(bid_b(), 4, {0}, {0}), PreconditionError);
}

TEST_CASE("epigraph pieces") {
  const auto a = bid_a();
  CHECK(charge_potential(a, 4) == doctest::Approx(40));
  auto p = epigraph_pieces(a, 4);
  REQUIRE(p.size() == 2);
  CHECK(p[0].alpha == doctest::Approx(0));
  CHECK(p[1].alpha == doctest::Approx(-2));
  CHECK(p[0].coefC == -10);
  CHECK(p[1].coefD == 13);
  const double v0 = p[0].alpha + p[0].coefC * 3 + p[0].coefD * 1;
  const double v1 = p[1].alpha + p[1].coefC * 3 + p[1].coefD * 1;
  CHECK(v0 == doctest::Approx(-15));
  CHECK(v1 == doctest::Approx(-13));
  CHECK(epigraph_pieces(a, 0)[0].alpha == 0.0);

  auto g = end_segment_piece(a, 4, 1);
  CHECK(g.alpha == doctest::Approx(-2));
  CHECK_THROWS_AS(end_segment_piece(a, 4, 2), ValidationError);
}

TEST_CASE("integral oracle fixtures") {
  const auto a = bid_a();
  CHECK(std::abs(integral_oracle_cost(a, 4, 3, 0, 1e-4) + 26) <= 3e-3);
  CHECK(std::abs(integral_oracle_cost(a, 7, 0, 4, 1e-4) - 56) <= 4e-3);
  CHECK(integral_oracle_cost(a, 4, 0, 0, 1e-4) == 0.0);
  CHECK_THROWS_AS(integral_oracle_cost(a, 4, 1, 0, 0.0), DomainError);
}

TEST_CASE("stage cost agrees with the integral oracle on random draws") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto bid = testing::random_bid(rng, testing::pick(rng, 1, 4));
    const double e = testing::uniform(rng, bid.E.front(), bid.E.back());
    double gC = 0.0, gD = 0.0;
    if (trial % 2 == 0)
      gC = testing::uniform(rng, 0.0, 1.0) * (bid.E.back() - e) / bid.etaC;
    else
      gD = testing::uniform(rng, 0.0, 1.0) * (e - bid.E.front()) * bid.etaD;
    const double exact = stage_cost(bid, e, gC, gD);
    const double approx = integral_oracle_cost(bid, e, gC, gD, 1e-3);
    CHECK(std::abs(exact - approx) <= (gC + gD) * max_price(bid) * 1e-3 + 1e-9);
  }
}

TEST_CASE("stage cost is continuous across breakpoints") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto bid = testing::random_bid(rng, testing::pick(rng, 2, 4));
    const std::size_t k = testing::pick(rng, 1, bid.segments() - 1);
    const double e = testing::uniform(rng, bid.E.front(), bid.E[k]);
    const double g = (bid.E[k] - e) / bid.etaC;
    const double lo = charge_cost(bid, e, g - 1e-9);
    const double hi = charge_cost(bid, e, g + 1e-9);
    CHECK(std::abs(hi - lo) <= 1e-6);
    const double e2 = testing::uniform(rng, bid.E[k], bid.E.back());
    const double d = (e2 - bid.E[k]) * bid.etaD;
    CHECK(std::abs(discharge_cost(bid, e2, d + 1e-9) - discharge_cost(bid, e2, d - 1e-9)) <= 1e-6);
  }
}

TEST_CASE("closed form matches trajectory cost and the max form dominates") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto bid = testing::random_edcr_bid(rng, testing::pick(rng, 1, 4));
    REQUIRE(validate_bid(bid).ok);
    REQUIRE(is_edcr(bid).edcr);
    const double s = testing::uniform(rng, bid.E.front(), bid.E.back());
    std::vector<double> gC, gD;
    testing::random_trajectory(rng, bid, s, testing::pick(rng, 1, 6), gC, gD);
    const double F = trajectory_cost(bid, s, gC, gD);
    const auto c = edcr_closed_form_cost(bid, s, gC, gD);
    const double scale = 1.0 + std::abs(F);
    CHECK(std::abs(c.max_form - F) <= 1e-9 * scale);
    CHECK(std::abs(c.case_form - F) <= 1e-9 * scale);
    double sC = 0, sD = 0;
    for (std::size_t t = 0; t < gC.size(); ++t) sC += gC[t], sD += gD[t];
    const auto pieces = epigraph_pieces(bid, s);
    for (const auto& p : pieces) CHECK(p.alpha + p.coefC * sC + p.coefD * sD <= F + 1e-9 * scale);
    const auto& top = pieces[c.end_segment];
    CHECK(std::abs(top.alpha + top.coefC * sC + top.coefD * sD - F) <= 1e-9 * scale);
  }
}

TEST_CASE("affine composition profile") {
  SUBCASE("EDCR bid is linear on each side of the starting SoC") {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(6.0 * i / 40.0);
    auto p = affine_composition_profile(bid_a(), 4, grid);
    for (double sd : p.second_difference) CHECK(std::abs(sd) <= 1e-9);
    CHECK(p.violations.empty());
    CHECK(p.cost[0] == 0.0);
  }
  SUBCASE("EDCR bid over the full range has only a convex kink at zero") {
    auto p = affine_composition_profile(bid_a(), 4);
    CHECK(p.g.size() == 101);
    CHECK(p.violations.empty());
  }
  SUBCASE("non-EDCR bid flags the breakpoint below the starting SoC") {
    auto p = affine_composition_profile(bid_b(), 6);
    REQUIRE(p.violations.size() == 1);
    const double step = p.g[1] - p.g[0];
    CHECK(std::abs(p.g[p.violations[0]] - (5.0 - 6.0)) <= step);
  }
  SUBCASE("infeasible points are marked") {
    auto p = affine_composition_profile(bid_a(), 4, {-5, 0, 7});
    CHECK_FALSE(p.feasible[0]);
    CHECK(p.feasible[1]);
    CHECK_FALSE(p.feasible[2]);
    CHECK(p.cost[1] == 0.0);
    CHECK(std::isnan(p.second_difference[0]));
  }
}

TEST_CASE("generalized storage helpers are valid bids") {
  auto [gb, gs] = make_generator(20, 5, 100);
  CHECK(validate_bid(gb).ok);
  CHECK(validate_spec(gs, gb).ok);
  CHECK(gs.gCmax == 0.0);
  CHECK(gs.s == gs.eMax);
  auto [lb, ls] = make_flexible_load(12, 5, 100);
  CHECK(validate_bid(lb).ok);
  CHECK(validate_spec(ls, lb).ok);
  CHECK(ls.gDmax == 0.0);
}
