#include "iml/mass.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iml {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Potentials potentials(const BrillSample& b, double beta_ell) {
  const auto [red, h] = reduce_sample(b, beta_ell);
  return {b.alpha, red.Z, h.V, h.W};
}

RadialJet radial_jet(const BrillSampler& s, const AsymptoticClass& c, double r, double theta) {
  const double bl = reduction_beta_ell(c);
  const double h = 1e-3 * r;
  Potentials p[5];
  for (int m = 0; m < 5; ++m) {
    const auto [rho, z] = coordinate_transform(c, r + (m - 2) * h, theta);
    p[m] = potentials(s(rho, z), bl);
  }
  auto d = [&](double Potentials::*f) {
    return (p[0].*f - 8 * (p[1].*f) + 8 * (p[3].*f) - p[4].*f) / (12 * h);
  };
  RadialJet j;
  j.value = p[2];
  j.d_r = {d(&Potentials::alpha), d(&Potentials::Z), d(&Potentials::V), d(&Potentials::W)};
  j.dlogrho = (c.kind == AsymptoticKind::ALE ? 2.0 : 1.0) / r;
  return j;
}

double mass_integrand(const RadialJet& g, const RadialJet& b, const AsymptoticClass& c) {
  const double da = g.value.alpha - b.value.alpha;
  double I = -2 * (g.d_r.alpha - b.d_r.alpha + g.d_r.Z) + (2 * da - g.value.Z) * g.dlogrho;
  if (c.kind != AsymptoticKind::ALE) I -= (g.value.V - b.value.V) * b.d_r.V;
  return I;
}

double x_radial(const RadialJet& g, const RadialJet& o) {
  const double da = g.value.alpha - o.value.alpha;
  return -2 * (g.d_r.alpha - o.d_r.alpha + g.d_r.Z - o.d_r.Z) + (2 * da - (g.value.Z - o.value.Z)) * g.dlogrho -
         (g.value.V - o.value.V) * o.d_r.V - (g.value.W - o.value.W) * o.d_r.W;
}

double x_directional(const BrillSampler& g, const BrillSampler& o, double beta_ell, double rho, double z,
                     const Eigen::Vector2d& d, double h) {
  Potentials pg[5], po[5];
  for (int m = 0; m < 5; ++m) {
    const double r = rho + (m - 2) * h * d(0), zz = z + (m - 2) * h * d(1);
    pg[m] = potentials(g(r, zz), beta_ell);
    po[m] = potentials(o(r, zz), beta_ell);
  }
  auto der = [&](const Potentials* p, double Potentials::*f) {
    return (p[0].*f - 8 * (p[1].*f) + 8 * (p[3].*f) - p[4].*f) / (12 * h);
  };
  const Potentials& G = pg[2];
  const Potentials& O = po[2];
  const double da = G.alpha - O.alpha, dZ = G.Z - O.Z;
  const double dlogrho = d(0) / rho;
  return -2 * (der(pg, &Potentials::alpha) - der(po, &Potentials::alpha) + der(pg, &Potentials::Z) -
               der(po, &Potentials::Z)) +
         (2 * da - dZ) * dlogrho - (G.V - O.V) * der(po, &Potentials::V) - (G.W - O.W) * der(po, &Potentials::W);
}

double sphere_density(const AsymptoticClass& c, double r, double theta) {
  if (c.kind == AsymptoticKind::ALE) return r * r * r / (2.0 * c.p) * std::sin(2 * theta);
  return c.ell * r * r * std::sin(theta);
}

double theta_max(const AsymptoticClass& c) { return c.kind == AsymptoticKind::ALE ? 0.5 * kPi : kPi; }

std::vector<double> default_radii() { return {1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5), 1e4}; }

double mass_flux(const BrillSampler& g, const BrillSampler& b, const AsymptoticClass& c, double r,
                 std::size_t quad_points) {
  if (quad_points < 64) throw std::invalid_argument("mass_flux: need at least 64 quadrature points");
  const QuadRule q = gauss_legendre(quad_points, 0.0, theta_max(c));
  return kPi * integrate(q, [&](double th) {
           return mass_integrand(radial_jet(g, c, r, th), radial_jet(b, c, r, th), c) * sphere_density(c, r, th);
         });
}

namespace {

MassEstimate finish(std::vector<double> radii, std::vector<double> flux) {
  MassEstimate m;
  m.radii = std::move(radii);
  m.fluxes = std::move(flux);
  const DecayFit fit = fit_decay(m.radii, m.fluxes);
  m.extrapolated = fit.limit;
  m.fit_exponent = fit.exponent;
  m.residual = fit.residual;
  return m;
}

void check_radii(const std::vector<double>& r) {
  if (r.size() < 3) throw std::invalid_argument("mass: need at least 3 radii");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("mass: radii must be strictly increasing");
}

// A sign change in successive differences larger than the noise floor
// means the flux is not settling toward a limit.
void check_monotone(const std::vector<double>& f) {
  double scale = 1.0;
  for (double v : f) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-4 * scale;
  int sign = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double d = f[i] - f[i - 1];
    if (std::fabs(d) <= tol) continue;
    const int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign)
      throw std::runtime_error("mass: flux sequence is not monotone; check the model pairing");
    sign = s;
  }
}

}  // namespace

MassEstimate estimate_mass(const BrillSampler& g, const AsymptoticClass& c, std::vector<double> radii,
                           std::size_t quad_points) {
  if (radii.empty()) radii = default_radii();
  check_radii(radii);
  const Family mf = model_family(c);
  const BrillSampler b = family_sampler(mf);
  std::vector<double> flux(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) { flux[i] = mass_flux(g, b, c, radii[i], quad_points); });
  check_monotone(flux);
  return finish(std::move(radii), std::move(flux));
}

MassEstimate estimate_mass(const Family& f, const AsymptoticClass& c, std::vector<double> radii,
                           std::size_t quad_points) {
  if (!f.has_sampler()) throw std::domain_error(f.name() + ": no sampler, use the closed-form mass");
  const AsymptoticClass d = default_model(f);
  if (d.kind != c.kind || (c.kind == AsymptoticKind::ALE && (c.p != d.p || c.q != d.q)) ||
      (c.kind == AsymptoticKind::ALF && c.k != d.k))
    throw std::invalid_argument("estimate_mass: model " + c.tag() + " does not match " + f.name() + " (" +
                                d.tag() + ")");
  return estimate_mass(family_sampler(f), c, std::move(radii), quad_points);
}

double infinity_flux(const BrillSampler& g, const BrillSampler& g_o, const AsymptoticClass& c, double r,
                     std::size_t quad_points) {
  const QuadRule q = gauss_legendre(quad_points, 0.0, theta_max(c));
  return 2 * kPi * integrate(q, [&](double th) {
           return x_radial(radial_jet(g, c, r, th), radial_jet(g_o, c, r, th)) * sphere_density(c, r, th);
         });
}

MassEstimate infinity_flux_estimate(const BrillSampler& g, const BrillSampler& g_o, const AsymptoticClass& c,
                                    std::vector<double> radii, std::size_t quad_points) {
  if (radii.empty()) radii = default_radii();
  check_radii(radii);
  std::vector<double> flux(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) { flux[i] = infinity_flux(g, g_o, c, radii[i], quad_points); });
  return finish(std::move(radii), std::move(flux));
}

}  // namespace iml
