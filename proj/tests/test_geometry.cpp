#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "curvature_oracle.hpp"
#include "iml/geometry.hpp"

using namespace iml;

TEST_CASE("reduction examples") {
  SUBCASE("G = rho I") {
    const auto [r, p] = reduce_torus_matrix(2.0 * Eigen::Matrix2d::Identity(), 2.0, 0.0);
    CHECK(std::fabs(r.Z) < 1e-15);
    CHECK((r.Phi - Eigen::Matrix2d::Identity()).norm() < 1e-15);
    CHECK(std::fabs(p.V) < 1e-15);
    CHECK(std::fabs(p.W) < 1e-15);
  }
  SUBCASE("Euclidean") {
    const double rho = 0.7, z = -0.4, R = std::hypot(rho, z);
    Eigen::Matrix2d G = Eigen::Vector2d(R - z, R + z).asDiagonal();
    const auto [r, p] = reduce_torus_matrix(G, rho, 0.0);
    CHECK(std::fabs(r.Z) < 1e-14);
    CHECK(p.V == doctest::Approx(0.5 * std::log((R - z) / (R + z))).epsilon(1e-14));
    CHECK(std::fabs(p.W) < 1e-14);
    CHECK((reconstruct_torus_matrix(p, r.Z, rho, 0.0) - G).norm() < 1e-14);
  }
  SUBCASE("identity point") {
    CHECK((reconstruct_torus_matrix({0, 0}, 0, 1, 0) - Eigen::Matrix2d::Identity()).norm() < 1e-15);
    const Eigen::Matrix2d P = phi_from_vw({0, 0}, 0.5);
    CHECK(P(0, 1) == doctest::Approx(0.5));
    CHECK(P(1, 1) == doctest::Approx(1.25));
    CHECK(P.determinant() == doctest::Approx(1.0));
  }
  SUBCASE("Kerr bulk point") {
    const BrillSample b = sample_brill(make_kerr(2, 1), 1.3, 0.4);
    const auto [r, p] = reduce_sample(b, 0.0);
    const Eigen::Matrix2d G = reconstruct_torus_matrix(p, r.Z, 1.3, 0.0);
    CHECK((G - b.G).norm() <= 1e-12 * b.G.norm());
  }
}

TEST_CASE("reduction round trip on random torus matrices") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(-2, 2), P(0.05, 5);
  double worst = 0, worst_det = 0;
  for (int n = 0; n < 10000; ++n) {
    const double beta_ell = n % 3 == 0 ? 0.0 : (n % 3 == 1 ? 0.5 : -1.3);
    const double rho = P(gen), Z = 0.5 * U(gen);
    const HyperbolicPoint p{U(gen), U(gen)};
    const Eigen::Matrix2d G = reconstruct_torus_matrix(p, Z, rho, beta_ell);
    const auto [r, q] = reduce_torus_matrix(G, rho, beta_ell);
    const Eigen::Matrix2d G2 = reconstruct_torus_matrix(q, r.Z, rho, beta_ell);
    worst = std::max(worst, (G2 - G).norm() / G.norm());
    worst_det = std::max(worst_det, std::fabs(r.Phi.determinant() - 1));
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_det <= 1e-12);
}

TEST_CASE("hyperbolic distance and energy density") {
  CHECK(h2_distance({0.3, -0.2}, {0.3, -0.2}) == 0.0);
  CHECK(h2_distance({0, 0}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h2_distance({0, 1}, {0, -1}) == doctest::Approx(2.0).epsilon(1e-14));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int n = 0; n < 1000; ++n) {
    const HyperbolicPoint a{U(gen), U(gen)}, b{U(gen), U(gen)}, c{U(gen), U(gen)};
    CHECK(h2_distance(a, c) <= h2_distance(a, b) + h2_distance(b, c) + 1e-12);
    CHECK(h2_distance(a, b) == doctest::Approx(h2_distance(b, a)));
  }
  CHECK(h2_energy_density({0, 0}, {0, 0}, 0.4) == 0.0);
  CHECK(h2_energy_density({1, 0}, {0, 0}, 0.0) == doctest::Approx(1.0));
  CHECK(h2_energy_density({1, 0}, {0, 0}, 1.0) == doctest::Approx(std::pow(std::cosh(1.0), 2)).epsilon(1e-14));
}

TEST_CASE("scalar curvature") {
  SUBCASE("flat and scalar-flat families") {
    for (const Family& f : {make_flat_af(0, 2), make_taub_bolt(2), make_rn(1, -3), make_kerr(2, 1)}) {
      const BrillSampler s = family_sampler(f);
      for (const auto& [rho, z] : bulk_sample_points(f, 20, 11)) {
        INFO(f.name(), " ", rho, " ", z);
        CHECK(std::fabs(scalar_curvature_extrapolated(s, rho, z)) <= 1e-6);
      }
    }
  }
  SUBCASE("perturbed G against the 4-metric oracle") {
    const Family sch = make_schwarzschild(1);
    const BrillSampler pert = [&](double rho, double z) {
      BrillSample b = sample_brill(sch, rho, z);
      const double e = std::exp(-rho * rho - z * z);
      b.G(0, 0) *= 1 + 0.1 * rho * rho * e;
      b.has_frames = false;
      return b;
    };
    for (double rho : {0.5, 1.0, 1.5})
      for (double z : {-0.5, 0.3}) {
        const double R = scalar_curvature(pert, rho, z, default_step(rho));
        const double Ro = oracle::scalar_curvature(pert, rho, z, 1e-3);
        CHECK(std::fabs(R) > 1e-3);
        CHECK(R == doctest::Approx(Ro).epsilon(1e-4));
      }
  }
}

TEST_CASE("bulk sample points are seeded and avoid the axis") {
  const Family f = make_kerr(2, 1);
  const auto a = bulk_sample_points(f, 50, 5), b = bulk_sample_points(f, 50, 5), c = bulk_sample_points(f, 50, 6);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a) CHECK(p.first > 0);
}

TEST_CASE("alpha from the torus matrix") {
  const Family S = make_schwarzschild(1);
  const TorusSampler G = [&](double r, double z) { return sample_brill(S, r, z).G; };
  double worst = 0;
  for (double rho : {0.5, 2.0, 6.0})
    for (double z : {-6.0, 0.0, 3.0})
      worst = std::max(worst, std::fabs(alpha_from_phi(G, default_model(S), rho, z) - sample_brill(S, rho, z).alpha));
  CHECK(worst <= 1e-6);

  const Family E = make_euclidean();
  const TorusSampler GE = [&](double r, double z) { return sample_brill(E, r, z).G; };
  CHECK(alpha_from_phi(GE, default_model(E), 1.3, 0.4) ==
        doctest::Approx(-0.5 * std::log(2 * std::hypot(1.3, 0.4))).epsilon(1e-6));

  const Family F = make_flat_af(0, 3);
  CHECK(model_alpha(default_model(F), 1.0, 2.0) == doctest::Approx(-std::log(3.0)));
}

TEST_CASE("field csv round trip") {
  FieldHeader h{"AF(0,4)", 0, 4, 2, 1};
  std::vector<FieldRow> rows{{0, 0, 1.5, -0.25, 0, 0}, {0.1, 0, 1.0 / 3, 0.125, 0, 0}};
  std::stringstream s;
  write_field_csv(s, h, rows);
  FieldHeader h2;
  const auto back = read_field_csv(s, &h2);
  REQUIRE(back.size() == 2);
  CHECK(back[1].V == 1.0 / 3);
  CHECK(h2.model == "AF(0,4)");
  CHECK(h2.n_rho == 2);
}
