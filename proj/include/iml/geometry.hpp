#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "iml/families.hpp"

namespace iml {

struct HyperbolicPoint {
  double V = 0, W = 0;
};

struct ReducedFields {
  double Z = 0;
  Eigen::Matrix2d Phi = Eigen::Matrix2d::Identity();
  double beta_ell = 0;
};

// Z = log(sqrt(det G)/rho), Phi = G/sqrt(det G).  beta_ell = 0 selects the
// untwisted branch, anything else the twisted AF branch.
std::pair<ReducedFields, HyperbolicPoint> reduce_torus_matrix(const Eigen::Matrix2d& G, double rho,
                                                              double beta_ell);
// Same reduction from a sample, using its frames when present.
std::pair<ReducedFields, HyperbolicPoint> reduce_sample(const BrillSample& b, double beta_ell);
Eigen::Matrix2d phi_from_vw(const HyperbolicPoint& p, double beta_ell);
Eigen::Matrix2d reconstruct_torus_matrix(const HyperbolicPoint& p, double Z, double rho, double beta_ell);

double h2_distance(const HyperbolicPoint& p, const HyperbolicPoint& q);
double h2_energy_density(const Eigen::Vector2d& gradV, const Eigen::Vector2d& gradW, double W);

using BrillSampler = std::function<BrillSample(double rho, double z)>;
BrillSampler family_sampler(const Family& f);

// Step used by the curvature and alpha derivatives unless given explicitly.
inline double default_step(double rho) { return rho * 1e-3 > 1e-4 ? rho * 1e-3 : 1e-4; }

// e^{2 alpha} R from the reduced formula, centered differences of step h.
double scalar_density(const BrillSampler& s, double rho, double z, double h);
double scalar_curvature(const BrillSampler& s, double rho, double z, double h);
// Steps h and h/2 combined to cancel the O(h^2) term; h <= 0 picks 5e-3 rho,
// where rounding and truncation balance for the shipped families.
double scalar_curvature_extrapolated(const BrillSampler& s, double rho, double z, double h = 0);

// n points off the axis and away from the corners, drawn from a seeded
// generator over a box scaled to the rod data.
std::vector<std::pair<double, double>> bulk_sample_points(const Family& f, int n, unsigned long long seed);

// Gradient of alpha implied by a Ricci-flat torus matrix (Z = 0, A = 0).
using TorusSampler = std::function<Eigen::Matrix2d(double rho, double z)>;
Eigen::Vector2d alpha_gradient(const TorusSampler& G, double rho, double z);

enum class AlphaPath {
  ZFirst,  // vertical to z = 0, then out along z = 0
  Ray      // straight out along the ray through the point
};

struct AlphaOptions {
  AlphaPath path = AlphaPath::ZFirst;
  double far_radius = 1e12;
  int segments = 2048;
};

// Asymptotic alpha of a class, as a function of (rho, z).
double model_alpha(const AsymptoticClass& c, double rho, double z);

// alpha(rho, z) by quadrature of alpha_gradient from far_radius, where it
// is matched to the model value.
double alpha_from_phi(const TorusSampler& G, const AsymptoticClass& c, double rho, double z,
                      const AlphaOptions& opt = {});

// |alpha_ZFirst - alpha_Ray|; large values signal a non-harmonic Phi.
double alpha_path_defect(const TorusSampler& G, const AsymptoticClass& c, double rho, double z,
                         const AlphaOptions& opt = {});

struct FieldRow {
  double rho = 0, z = 0, V = 0, W = 0, Z = 0, alpha = 0;
};

struct FieldHeader {
  std::string model;
  double beta = 0, ell = 0;
  int n_rho = 0, n_z = 0;
};

void write_field_csv(std::ostream& out, const FieldHeader& h, const std::vector<FieldRow>& rows);
std::vector<FieldRow> read_field_csv(std::istream& in, FieldHeader* h = nullptr);

}  // namespace iml
