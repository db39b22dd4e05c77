#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "symgraph/bounds.hpp"

using namespace symgraph;
using Catch::Approx;

TEST_CASE("lb_connected examples") {
  CHECK(lb_connected(3, 2, 1.0, 0.0, 0.0) == 1.0);
  CHECK(lb_connected(1, 4, 1.0, 0.0, 0.3) == 1.0);
  const double threshold = std::pow(1.0 / (2.0 * std::exp(3.0)), 2.0 / 2.0);
  CHECK(lb_connected(2, 2, 0.9, threshold * 1.01, 0.0) == 0.0);
  CHECK(lb_connected_raw(2, 2, 0.9, threshold * 1.01, 0.0) == 0.0);
  CHECK(lb_connected(2, 2, 0.9, 1e-4, 0.0) == Approx(0.98780).margin(5e-6));
  // Independent evaluation: (1 - 2e^3·1e-4)^3 · (1 - 0.1^4)^2.
  const double oracle_value = std::pow(1 - 2 * std::exp(3.0) * 1e-4, 3) * std::pow(1 - 1e-4, 2);
  CHECK(lb_connected(2, 2, 0.9, 1e-4, 0.0) == Approx(oracle_value).epsilon(1e-12));
  CHECK_THROWS_AS(lb_connected(0, 2, 0.9, 0.1, 0.0), ArgumentError);
}

TEST_CASE("ub_disconnected examples") {
  CHECK(ub_disconnected(100, 2, 2, 0.0, 0.0, 3) == 0.0);
  const auto ub = ub_disconnected(100, 2, 2, 1e-6, 0.0, 3);
  REQUIRE(ub);
  CHECK(*ub == Approx(2 * std::exp(1.0) * 100 * 36 * 1e-6).epsilon(1e-12));
  CHECK(*ub == Approx(0.019572).margin(1e-6));
  CHECK_FALSE(ub_disconnected(100, 2, 2, 1e-3, 0.0, 3));
  CHECK_THROWS_AS(ub_disconnected(100, 2, 2, 1e-3, 0.0, 0), ArgumentError);
}

TEST_CASE("gamma_star examples") {
  CHECK(gamma_star(50, 3, 1, 1.0, 0.0, 0.0, 0.0, 4) == 1.0);
  CHECK(gamma_star(100, 2, 2, 0.9, 1e-7, 1e-4, 0.0, 5) == Approx(0.98236).margin(5e-6));
  const double penalty = 2 * std::exp(1.0) * 100 * 100 * 1e-7;
  CHECK(penalty == Approx(5.4366e-3).margin(1e-7));
  CHECK(gamma_star(100, 2, 2, 0.9, 1e-3, 1e-4, 0.0, 5) == 0.0);
  CHECK(gamma_star_raw(100, 2, 2, 0.9, 1e-3, 1e-4, 0.0, 5) < -50.0);
}

TEST_CASE("folded and bare penalties differ only through eps-") {
  const double folded = gamma_star(100, 2, 2, 0.9, 1e-7, 1e-4, 1e-6, 5, PenaltyForm::kFolded);
  const double bare = gamma_star(100, 2, 2, 0.9, 1e-7, 1e-4, 1e-6, 5, PenaltyForm::kBare);
  CHECK(bare > folded);
  CHECK(gamma_star(100, 2, 2, 0.9, 1e-7, 1e-4, 0.0, 5, PenaltyForm::kBare) ==
        gamma_star(100, 2, 2, 0.9, 1e-7, 1e-4, 0.0, 5, PenaltyForm::kFolded));
}

TEST_CASE("sandwich identity over a random grid") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + rng() % 2000, d = 1 + rng() % 6, lambda = 1 + rng() % 5, b = 1 + rng() % 50;
    const double pp = unit(rng), pm = std::pow(10.0, -8 * unit(rng)), ep = 0.2 * unit(rng),
                 em = std::pow(10.0, -9 * unit(rng));
    const double lb = lb_connected(d, lambda, pp, ep, em);
    const double pen = 2 * std::exp(1.0) * static_cast<double>(n) * std::pow(static_cast<double>(lambda * b), 2) *
                       (pm + em - pm * em);
    REQUIRE(gamma_star(n, d, lambda, pp, pm, ep, em, b) == Approx(std::max(0.0, lb - pen)).margin(1e-12));
    const auto ub = ub_disconnected(n, d, lambda, pm, em, b);
    if (ub && lb >= 0) {
      REQUIRE(gamma_star(n, d, lambda, pp, pm, ep, em, b) == Approx(std::max(0.0, lb - *ub)).margin(1e-12));
    }
    const auto pre = theorem_preconditions(n, d, lambda, pm, em, b);
    const double q = pm + em - pm * em;
    REQUIRE(pre.theorem1() == (q * static_cast<double>(b * b) <
                               1.0 / (2 * std::exp(1.0) * static_cast<double>(lambda * lambda * n))));
  }
}

TEST_CASE("monotonicity battery") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const std::size_t d = 1 + rng() % 5, lambda = 1 + rng() % 4, n = 10 + rng() % 1000, b = 1 + rng() % 20;
    const double pp = unit(rng), ep = 0.3 * unit(rng), em = 0.01 * unit(rng), pm = 1e-6 * unit(rng);
    const double lb = lb_connected(d, lambda, pp, ep, em);
    REQUIRE(lb_connected(d, lambda, std::min(1.0, pp + 0.05), ep, em) >= lb);
    REQUIRE(lb_connected(d, lambda + 1, pp, ep, em) >= lb - 1e-15);
    REQUIRE(lb_connected(d, lambda, pp, std::min(1.0, ep + 0.05), em) <= lb);
    REQUIRE(lb_connected(d + 1, lambda, pp, ep, em) <= lb);

    const double g = gamma_star(n, d, lambda, pp, pm, ep, em, b);
    REQUIRE(gamma_star(n, d, lambda, pp, pm * 2, ep, em, b) <= g);
    REQUIRE(gamma_star(n, d, lambda, pp, pm, std::min(1.0, ep + 0.05), em, b) <= g);
    REQUIRE(gamma_star(n, d + 1, lambda, pp, pm, ep, em, b) <= g);
    REQUIRE(gamma_star(n, d, lambda, std::min(1.0, pp + 0.05), pm, ep, em, b) >= g);

    const auto ub = ub_disconnected(n, d, lambda, pm, em, b);
    if (!ub) continue;
    auto at_least = [&](std::optional<double> other) { return !other || *other >= *ub; };
    REQUIRE(at_least(ub_disconnected(n, d, lambda, pm * 1.5, em, b)));
    REQUIRE(at_least(ub_disconnected(n + 10, d, lambda, pm, em, b)));
    REQUIRE(at_least(ub_disconnected(n, d, lambda, pm, em, b + 1)));
    REQUIRE(at_least(ub_disconnected(n, d, lambda + 1, pm, em, b)));
  }
}

TEST_CASE("gilbert bounds examples") {
  const GilbertBounds one = gilbert_bounds(7, 1.0);
  CHECK(one.exact_formula_lb == 1.0);
  CHECK(one.corollary_lb == 1.0);
  const GilbertBounds single = gilbert_bounds(1, 0.2);
  CHECK(single.exact_formula_lb == 1.0);
  CHECK(single.corollary_lb == 1.0);
  const GilbertBounds b = gilbert_bounds(5, 0.7);
  const double exact = oracle::connectivity_probability(5, 0.7);
  CHECK(exact >= b.exact_formula_lb);
  CHECK(b.exact_formula_lb >= b.corollary_lb);
  CHECK_THROWS_AS(gilbert_bounds(0, 0.5), ArgumentError);
  CHECK_THROWS_AS(gilbert_bounds(3, 1.5), ArgumentError);
}

TEST_CASE("gilbert bounds against exhaustive enumeration") {
  for (int n = 2; n <= 5; ++n) {
    for (double p : {0.3, 0.5, 0.7, 0.9}) {
      const GilbertBounds b = gilbert_bounds(static_cast<std::size_t>(n), p);
      const double exact = oracle::connectivity_probability(n, p);
      INFO("n=" << n << " p=" << p);
      CHECK(exact >= b.exact_formula_lb);
      if (1.0 - p <= 0.5) CHECK(b.exact_formula_lb >= b.corollary_lb);
    }
  }
}

TEST_CASE("gilbert corollary domination for larger n") {
  for (std::size_t n = 2; n <= 50; ++n)
    for (double q = 0.0; q <= 0.5; q += 0.025) {
      const GilbertBounds b = gilbert_bounds(n, 1.0 - q);
      REQUIRE(b.exact_formula_lb >= b.corollary_lb);
    }
}

TEST_CASE("laplacian_diff_bound examples") {
  CHECK(laplacian_diff_bound(1000, 3, 5) == Approx(0.13688).margin(5e-6));
  CHECK(laplacian_diff_bound(1000, 3, 5) == Approx(std::sqrt(6.0) * 5 / std::sqrt(1000 * std::log(3000.0))));
  CHECK(laplacian_diff_bound(100, 1, 1) == Approx(std::sqrt(2.0) / std::sqrt(100 * std::log(100.0))));
  CHECK(laplacian_diff_bound(100, 1, 1) == Approx(0.065901).margin(5e-7));
  CHECK(laplacian_diff_bound(4000, 2, 7) < laplacian_diff_bound(1000, 2, 7));
  CHECK_THROWS_AS(laplacian_diff_bound(1, 1, 1), ArgumentError);
}

TEST_CASE("theorem preconditions examples") {
  const auto a = theorem_preconditions(100, 2, 2, 1e-6, 1e-6, 3);
  CHECK(a.theorem1());
  CHECK_FALSE(a.theorem2());
  CHECK_FALSE(a.theorem3());
  CHECK(a.possibility.rhs == Approx(4.60e-4).margin(5e-7));

  const auto b = theorem_preconditions(2000, 8, 2, 5e-4, 0.0, 40, 1.0);
  CHECK(b.theorem2());
  CHECK_FALSE(b.theorem1());
  CHECK(b.small_world_depth.rhs == 8.0);

  const auto c = theorem_preconditions(1000, 7, 2, 2 * std::log(1000.0) / 1000.0, 0.0, 10, 2.0, 1.5);
  CHECK(c.theorem3());
}

TEST_CASE("possibility and small-world regimes are disjoint") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const std::size_t n = 2 + rng() % 5000, lambda = 1 + rng() % 6, b = 1 + rng() % 30, d = 1 + rng() % 12;
    const double q = std::pow(10.0, -10 * unit(rng));
    const double c2 = 1.0 + 3 * unit(rng);
    const auto pre = theorem_preconditions(n, d, lambda, q, 0.0, b, c2);
    REQUIRE_FALSE((pre.possibility.holds && pre.small_world_noise.holds));
  }
}

TEST_CASE("bound report clamps and keeps raw values") {
  SampleParams p;
  p.p_plus = 0.9;
  p.p_minus = 1e-3;
  p.eps_plus = 1e-4;
  p.lambda = 2;
  const BoundReport r = make_bound_report(100, 2, p, 5, 4);
  CHECK(r.gamma_star == 0.0);
  CHECK(r.gamma_star_raw < 0.0);
  CHECK_FALSE(r.ub_disconnected);
  REQUIRE(r.laplacian_bound);
  CHECK(*r.laplacian_bound == laplacian_diff_bound(100, 2, 4));
  CHECK(r.lb_connected >= 0.0);
  CHECK(r.lb_connected <= 1.0);
}
