#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "iml/geometry.hpp"

namespace iml {

enum class RodCase { I, II0, IIbeta, III };
const char* rod_case_name(RodCase c);
// beta_ell == 0 selects case II0 for v = (0,1).
RodCase rod_case(const RodStructure& v, double beta_ell);

// A geometry seen from the axis: samples, a cancellation-free G(v,v) and the
// twist of its reduction branch.
struct DefectSource {
  BrillSampler sample;
  std::function<double(double rho, double z, const RodStructure& v)> norm2;
  double beta_ell = 0;
};
DefectSource defect_source(const Family& f);
DefectSource defect_source(const BrillSampler& s, double beta_ell);

struct DefectOptions {
  std::vector<double> rho = {1e-2, 1e-3, 1e-4};
  std::vector<double> exponents = {1, 2};
  double agreement = 1e-6;  // limit vs identity
  std::size_t quad_points = 32;
  double truncation = 1e3;  // |z| cut for semi-infinite rods
};

struct DefectValue {
  double limit = 0;     // Richardson limit of 1/2 log(rho^2 e^{2 alpha} / G(v,v))
  double identity = 0;  // case identity in (V, W, alpha, Z)
  RodCase rod_case = RodCase::I;
};

// Samples are taken at rho_k * min(1, d)^2, d the distance to the nearest
// corner; the axis expansion degrades like rho / d^2 there.
// Throws std::runtime_error when the two evaluations disagree.
DefectValue angle_defect_at(const DefectSource& s, const RodStructure& v, double z, double corner_distance,
                            const DefectOptions& opt = {});
DefectValue angle_defect_at(const Family& f, std::size_t rod_index, double z, const DefectOptions& opt = {});

struct DefectProfile {
  std::size_t rod_index = 0;
  RodCase rod_case = RodCase::I;
  double z_lo = 0, z_hi = 0;  // truncated for semi-infinite rods
  bool finite = true;
  std::vector<std::pair<double, double>> samples;  // (z, theta)
  std::vector<double> weights;
  double integral = 0;
};

std::vector<DefectProfile> defect_profiles(const DefectSource& s, const RodDataSet& rods,
                                           const DefectOptions& opt = {});
std::vector<DefectProfile> defect_profiles(const Family& f, const DefectOptions& opt = {});

// 2 pi sum over rods of int (theta - theta_o) dz.  Semi-infinite rods enter
// only when the difference decays; a persistent tail throws.
double defect_term(const std::vector<DefectProfile>& g, const std::vector<DefectProfile>& o);
// Same, finite rods only.
double finite_defect_integral(const std::vector<DefectProfile>& g);

// 2 pi int X(nu) dA over the (rho,z) half-sphere of radius sigma^2/2 about
// z_n, nu pointing into the corner.
// Throws when the ball reaches a neighbouring turning point.
double corner_flux(const BrillSampler& g, const BrillSampler& o, double beta_ell, double z_n, double sigma,
                   double neighbour_distance = 1e300, std::size_t quad_points = 64);

// Closed-form RN defect on the finite rod, 1/2 log(r_+^4 / (ell^2 s^2)).
double rn_defect_closed_form(const Family& rn);
// The same written through the turning points,
// 1/2 log((z2 - z1 + 2 sqrt(z2^2 + ell^2 c1))^4 / (4 ell^4 (z2 - z1)^2)).
// Equal to the closed form for M >= 0 only.
double rn_defect_turning_point_form(const Family& rn);

}  // namespace iml
