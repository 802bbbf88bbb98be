#include <doctest.h>

#include <cmath>

#include "iml/comparison.hpp"

using namespace iml;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("P closed forms") {
  const PForms p = rn_vs_schwarzschild_P(1, -3);
  CHECK(p.reduced == doctest::Approx(1 - 2 + 4 * std::log(4.0 / 3)).epsilon(1e-14));
  CHECK(p.reduced == doctest::Approx(0.1507).epsilon(1e-3));
  CHECK(std::fabs(p.reduced - p.x_form) <= 1e-12);
  CHECK(rn_vs_schwarzschild_P(0, -1).reduced == doctest::Approx(2 * std::log(2.0) - 1).epsilon(1e-14));
  CHECK(rn_vs_schwarzschild_P(1.5, 0).reduced == doctest::Approx(0.0).scale(1));
  CHECK(p.full(4.5) == doctest::Approx(4 * kPi * 4.5 * p.reduced));
  CHECK_THROWS_AS(rn_vs_schwarzschild_P(1, 2), std::domain_error);
  CHECK_THROWS_AS(rn_vs_schwarzschild_P(-1, 0.5), std::domain_error);
}

TEST_CASE("P is nonnegative and vanishes only at c1 = 0") {
  int zeros = 0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double M = -2 + 4.0 * i / 99;
      const double c1 = -4 + 5.0 * j / 99;
      if (c1 > M * M || M + std::sqrt(M * M - c1) <= 0) continue;
      const PForms p = rn_vs_schwarzschild_P(M, c1);
      CHECK(p.reduced >= -1e-12);
      if (std::fabs(p.reduced) <= 1e-12) {
        ++zeros;
        CHECK(std::fabs(c1) < 1e-12);
      }
    }
  (void)zeros;
}

TEST_CASE("theorem gap") {
  SUBCASE("Kerr against itself") {
    const TheoremGapReport r = theorem_gap(make_kerr(2, 1), make_kerr(2, 1));
    CHECK(std::fabs(r.slack) <= r.tol);
    CHECK(r.equality);
  }
  SUBCASE("c1 = 0 is equality") {
    const Family g = make_rn_mc(1.5, 0);
    const TheoremGapReport r = theorem_gap(g, schwarzschild_partner(g));
    CHECK(r.equality);
  }
  SUBCASE("RN against its partner matches the closed form") {
    const Family g = make_rn_mc(1, -3);
    const TheoremGapReport r = theorem_gap(g, schwarzschild_partner(g));
    const double want = rn_vs_schwarzschild_P(1, -3).full(g.ell);
    CHECK(r.slack > 0);
    CHECK_FALSE(r.equality);
    CHECK(std::fabs(r.slack - want) <= 2e-3 * want);
  }
  SUBCASE("different rod data is refused") {
    CHECK_THROWS_AS(theorem_gap(make_rn_mc(1, -3), make_schwarzschild(1)), std::invalid_argument);
    CHECK_THROWS_AS(theorem_gap(make_taub_nut(2), make_taub_bolt(2)), std::invalid_argument);
  }
}

TEST_CASE("bold mass") {
  const Family s = make_schwarzschild(1);
  CHECK(bold_mass(s) == doctest::Approx(exact_mass(s)).epsilon(1e-10));
  CHECK(bold_mass(make_rn_mc(1, -3, 0.5)) == doctest::Approx(2 * kPi - 8 * kPi * std::log(3.0)).epsilon(1e-8));
  CHECK(std::fabs(bold_mass(make_flat_alf(1, 2))) < 1e-9);
}
