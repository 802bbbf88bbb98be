#include <doctest.h>

#include <cmath>

#include "iml/families.hpp"

using namespace iml;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<Family> sampled_families() {
  return {make_kerr(2, 1),      make_schwarzschild(1),         make_rn(1, -3),         make_taub_nut(2),
          make_taub_bolt(2),    make_charged_taub_bolt(1, 2),  make_eguchi_hanson(1),  make_euclidean(),
          make_flat_ale(2, 1),  make_flat_alf(1, 2, 0, true),  make_flat_af(0.3, 2)};
}
}  // namespace

TEST_CASE("closed-form masses") {
  CHECK(exact_mass(make_kerr(2, 1)) == doctest::Approx(36 * kPi / 5).epsilon(1e-14));
  CHECK(exact_mass(make_schwarzschild(1)) == doctest::Approx(16 * kPi).epsilon(1e-14));
  CHECK(exact_mass(make_taub_nut(2)) == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(exact_mass(make_taub_bolt(2)) == doctest::Approx(5 * kPi).epsilon(1e-14));
  CHECK(exact_mass(make_charged_taub_bolt(1, 2)) == doctest::Approx(5 * kPi).epsilon(1e-14));
  CHECK(exact_mass(make_eguchi_hanson(1)) == 0.0);
  const Family rn = make_rn(1, -3);
  CHECK(rn.M == doctest::Approx(-1));
  CHECK(rn.ell == doctest::Approx(0.5));
  CHECK(exact_mass(rn) == doctest::Approx(-2 * kPi).epsilon(1e-14));
  const auto k = kerr_mass_forms(2, 1);
  CHECK(k.first == doctest::Approx(k.second).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_kerr(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_taub_nut(-1), std::invalid_argument);
  CHECK_THROWS_AS(make_eguchi_hanson(0), std::invalid_argument);
  CHECK_THROWS_AS(family_from_kv({{"family", "nope"}}), std::invalid_argument);
  CHECK_THROWS_AS(family_from_kv({{"family", "kerr"}, {"r_plus", "2"}}), std::invalid_argument);
  const Family k = family_from_kv({{"family", "kerr"}, {"r_plus", "2"}, {"a", "1"}});
  CHECK(k.tag == FamilyTag::Kerr);
  CHECK(k.r_plus == 2.0);
}

TEST_CASE("rod data of the families") {
  const RodDataSet k = family_rod_data(make_kerr(2, 1));
  REQUIRE(k.turning_points.size() == 2);
  CHECK(k.rods == std::vector<RodStructure>{{1, 0}, {0, 1}, {1, 0}});
  CHECK(k.turning_points[0] == doctest::Approx(-k.turning_points[1]));

  const RodDataSet tn = family_rod_data(make_taub_nut(2));
  CHECK(tn.turning_points.size() == 1);
  CHECK(tn.rods == std::vector<RodStructure>{{1, 0}, {1, -1}});

  const RodDataSet eh = family_rod_data(make_eguchi_hanson(1));
  CHECK(eh.rods == std::vector<RodStructure>{{0, 1}, {1, 0}, {2, -1}});
  CHECK(eh.turning_points[0] == doctest::Approx(-0.25));
  CHECK(eh.turning_points[1] == doctest::Approx(0.25));

  for (const Family& f : sampled_families()) {
    INFO(f.name());
    const ValidationReport v = validate_rod_data(family_rod_data(f));
    if (f.tag == FamilyTag::FlatALE && f.p > 1) {
      // C^2 / Z_p has an orbifold corner.
      REQUIRE(v.violations.size() == 1);
      CHECK(v.violations[0].kind == ViolationKind::Admissibility);
    } else {
      CHECK(v.valid());
    }
  }
}

TEST_CASE("coordinate transforms") {
  const auto ale = coordinate_transform(AsymptoticClass::ale(1, 0), 1.0, kPi / 4);
  CHECK(ale.first == doctest::Approx(0.5));
  CHECK(std::fabs(ale.second) < 1e-15);
  CHECK(coordinate_transform(AsymptoticClass::af(0, 1), 3.0, 0.0).first == 0.0);
  const auto eh = coordinate_transform(make_eguchi_hanson(1), 1.0, kPi / 4);
  CHECK(std::fabs(eh.first) < 1e-15);
  CHECK(std::fabs(eh.second) < 1e-15);
  for (const Family& f : {make_kerr(2, 1), make_rn(1, -3), make_taub_bolt(2)}) {
    const auto [rho, z] = coordinate_transform(f, f.r_plus + 1.3, 0.7);
    const auto [r, t] = inverse_transform(f, rho, z);
    CHECK(r == doctest::Approx(f.r_plus + 1.3).epsilon(1e-12));
    CHECK(t == doctest::Approx(0.7).epsilon(1e-12));
  }
}

TEST_CASE("Brill samples") {
  SUBCASE("det G = rho^2 e^{2Z}, Z = 0 for the vacuum families") {
    for (const Family& f : sampled_families()) {
      const double L = f.chart_L;
      for (double r : {0.3, 1.0, 2.5})
        for (double z : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
          const BrillSample b = sample_brill(f, r * L, z * L);
          INFO(f.name(), " ", r, " ", z);
          CHECK(b.G.determinant() / (r * r * L * L) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
  }
  SUBCASE("Euclidean at (1,0)") {
    const BrillSample b = sample_brill(make_euclidean(), 1.0, 0.0);
    CHECK(std::exp(2 * b.alpha) == doctest::Approx(0.5));
    CHECK((b.G - Eigen::Matrix2d::Identity()).norm() < 1e-14);
  }
  SUBCASE("flat AF") {
    const BrillSample b = sample_brill(make_flat_af(0, 3), 1.5, 0.2);
    CHECK(b.alpha == doctest::Approx(-std::log(3.0)));
    CHECK(b.G(1, 1) == doctest::Approx(9.0));
  }
  SUBCASE("torus direction degenerates on its rod") {
    const Family s = make_schwarzschild(1);
    const RodDataSet r = family_rod_data(s);
    for (std::size_t n = 0; n < r.rods.size(); ++n) {
      const double z = n == 0 ? r.turning_points[0] - 2 : n == 1 ? 0.5 * (r.turning_points[0] + r.turning_points[1])
                                                                  : r.turning_points[1] + 2;
      CHECK(torus_norm2(s, 1e-6, z, r.rods[n]) < 1e-9);
      CHECK(torus_norm2(s, 1e-6, z, r.rods[n] == RodStructure{1, 0} ? RodStructure{0, 1} : RodStructure{1, 0}) > 1e-3);
    }
  }
}

TEST_CASE("Chen-Teo closed forms") {
  for (double xi = 0.52; xi < 0.70; xi += 0.02) {
    const ChenTeoForms c = chen_teo_forms(1.0, xi);
    CHECK(c.mass_raw > 0);
    CHECK(std::fabs(c.mass_raw - c.mass_substituted) <= 1e-12 * c.mass_raw);
  }
  CHECK_FALSE(make_chen_teo(1.0, 0.6).has_sampler());
}
