#pragma once

#include <vector>

#include "iml/geometry.hpp"
#include "iml/numerics.hpp"

namespace iml {

// Reduced potentials of a Brill sample.
struct Potentials {
  double alpha = 0, Z = 0, V = 0, W = 0;
};
Potentials potentials(const BrillSample& b, double beta_ell);

// Potentials and their model-radial derivatives at a point of the model
// chart (r, theta).
struct RadialJet {
  Potentials value, d_r;
  double dlogrho = 0;  // d_r log rho
};
RadialJet radial_jet(const BrillSampler& s, const AsymptoticClass& c, double r, double theta);

// (div_b e - d Tr_b e)(d_r) in reduced form.
double mass_integrand(const RadialJet& g, const RadialJet& b, const AsymptoticClass& c);
// X(d_r) for a pair (g, g_o).
double x_radial(const RadialJet& g, const RadialJet& o);

// X(d) at (rho, z) for the unit direction d in the (rho, z) plane, by a
// 5-point difference of step h along d.
double x_directional(const BrillSampler& g, const BrillSampler& o, double beta_ell, double rho, double z,
                     const Eigen::Vector2d& d, double h);

// Area density of the model sphere per unit theta, torus factor excluded.
double sphere_density(const AsymptoticClass& c, double r, double theta);
double theta_max(const AsymptoticClass& c);

struct MassEstimate {
  std::vector<double> radii, fluxes;
  double extrapolated = 0;
  double fit_exponent = 0;
  double residual = 0;
};

std::vector<double> default_radii();

// flux(r) = pi * int I dA_r / dtheta for one radius.
double mass_flux(const BrillSampler& g, const BrillSampler& b, const AsymptoticClass& c, double r,
                 std::size_t quad_points = 96);

MassEstimate estimate_mass(const BrillSampler& g, const AsymptoticClass& c, std::vector<double> radii = {},
                           std::size_t quad_points = 96);
// Checks the family against the class before sampling.
MassEstimate estimate_mass(const Family& f, const AsymptoticClass& c, std::vector<double> radii = {},
                           std::size_t quad_points = 96);

// 2 pi int X(nu) dA over the model sphere of radius r.
double infinity_flux(const BrillSampler& g, const BrillSampler& g_o, const AsymptoticClass& c, double r,
                     std::size_t quad_points = 96);
MassEstimate infinity_flux_estimate(const BrillSampler& g, const BrillSampler& g_o, const AsymptoticClass& c,
                                    std::vector<double> radii = {}, std::size_t quad_points = 96);

}  // namespace iml
