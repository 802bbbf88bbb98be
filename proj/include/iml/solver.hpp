#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "iml/defects.hpp"
#include "iml/geometry.hpp"
#include "iml/mass.hpp"

namespace iml {

// Model map values with first derivatives and flat Laplacians.
struct ModelJet {
  double V = 0, W = 0;
  Eigen::Vector2d dV = Eigen::Vector2d::Zero(), dW = Eigen::Vector2d::Zero();
  double lapV = 0, lapW = 0;
};

// A harmonic reference map carrying the rod singularities.  The relaxation
// works with differences from it and relies on it being an exact critical
// point of the energy.
struct ModelMap {
  std::string description;
  RodDataSet rods;
  AsymptoticClass cls;
  double beta_ell = 0;
  std::function<ModelJet(double rho, double z)> jet;

  HyperbolicPoint value(double rho, double z) const;
};

// Diagonal AF_0 rod data: superposed rod potentials,
// V = log(rho / ell^2) - sum over (0,1) rods of log((R_a + R_b - L) / (R_a + R_b + L)).
// Other rod data must match a shipped family up to a shift in z.
// Throws std::invalid_argument otherwise.
ModelMap build_model_map(const RodDataSet& rods, const AsymptoticClass& c);
// Exact (V, W) of a family, derivatives by differences.
ModelMap family_model_map(const Family& f, double z_shift = 0.0);

struct SolverGrid {
  std::vector<double> rho, z;  // rho[0] = 0 is the axis row
};

// rho_i = R sinh(c xi_i) / sinh(c), xi_i = i / (n_rho - 1); grading c = 0
// gives a uniform grid.
SolverGrid make_grid(int n_rho, int n_z, double R, double z_max, double grading);
SolverGrid make_box_grid(int n_rho, int n_z, double rho_min, double rho_max, double z_min, double z_max);

struct SolverConfig {
  double tolerance = 1e-8;
  int max_sweeps = 10000;
  double omega = 1.95;
  int n_rho = 129, n_z = 257;
  double R = 0, z_max = 0;  // 0 picks max(40, 10 max|z_n|)
  double grading = 2.0;
  int newton_iterations = 5;
  int residual_every = 1;  // sweeps between residual evaluations

  void validate() const;
};

// u = V - V_model, w = W - W_model at every node.
struct HyperbolicField {
  SolverGrid grid;
  ModelMap model;
  Eigen::MatrixXd u, w;  // (i, j) = (rho index, z index)

  HyperbolicPoint value(int i, int j) const;
  std::vector<FieldRow> rows() const;  // alpha and Z left at 0
  FieldHeader header() const;
};

HyperbolicField make_field(const ModelMap& model, const SolverConfig& cfg);
HyperbolicField make_field(const ModelMap& model, SolverGrid grid);
// Differences of a sampled geometry from the model on the field's grid.
// Axis nodes take the value of the first row.
void load_geometry(HyperbolicField& f, const BrillSampler& s);

struct ResidualGrids {
  Eigen::MatrixXd RV, RW;  // zero on the axis row and the outer boundary
  double sup(const HyperbolicField& f, double rho_min = 0, double corner_margin = 0) const;
};

// div(cosh^2 W grad V) and Laplace W - sinh W cosh W |grad V|^2 with the
// model terms taken from its jet and centered differences for (u, w).
ResidualGrids residual(const HyperbolicField& f);

// Sup over free nodes of the discrete energy gradient per unit volume; zero
// exactly at a discrete critical point.
double variational_residual(const HyperbolicField& f);

// Discrete functional minimized by relax: energy relative to the model,
// with the model's first variation removed.
double discrete_reduced_energy(const HyperbolicField& f);

struct RelaxReport {
  int sweeps = 0;
  bool converged = false;
  double final_residual = 0;
  double seconds = 0;
  std::vector<double> energy_history;    // entry 0 is the starting value
  std::vector<double> residual_history;  // every residual_every sweeps
};

struct RelaxResult {
  HyperbolicField field;
  RelaxReport report;
};

// Red-black nonlinear Gauss-Seidel: pointwise 2x2 Newton, over-relaxed and
// backtracked so that the discrete functional never increases.  The outer
// boundary and the axis components fixed by the rod case stay at the model.
RelaxResult relax(const HyperbolicField& start, const SolverConfig& cfg);

struct Box {
  double rho_min = 0, rho_max = 0, z_min = 0, z_max = 0;
};

// 2 pi * 1/2 int (cosh^2 W |grad V|^2 + |grad W|^2) rho drho dz over the
// grid cells inside the box.  Throws std::domain_error if rho_min <= 0.
double energy(const HyperbolicField& f, const Box& omega);

struct Margins {
  double sigma1 = 1e-1, sigma2 = 1e-1, sigma3 = 2.0 / 50;
};
std::vector<Margins> default_schedule();

struct ReducedEnergyReport {
  std::vector<Margins> schedule;
  std::vector<double> values;
  double limit = 0;  // decay fit over the schedule, last value if the fit fails
};

// Reduced energy of psi relative to psi_o on the edges inside Omega_sigma.
// Both fields must share grid and model; psi_o must be a discrete critical
// point to 1e-10.  Throws std::invalid_argument otherwise.
double reduced_energy(const HyperbolicField& psi, const HyperbolicField& psi_o, const Margins& m);
ReducedEnergyReport reduced_energy(const HyperbolicField& psi, const HyperbolicField& psi_o,
                                   const std::vector<Margins>& schedule = default_schedule());

struct ConvexityGap {
  double lhs = 0;      // reduced energy over the whole grid
  double rhs_raw = 0;  // (2 pi int dist^6 rho drho dz)^{1/3}
};
ConvexityGap convexity_gap_check(const HyperbolicField& psi, const HyperbolicField& psi_o);

struct DivergenceReport {
  double axis = 0, corner = 0, infinity = 0;
  double boundary = 0;  // sum of the three
  double reduced = 0;   // reduced energy density integrated over Omega
  double curvature = 0, dZ = 0, twist = 0;  // e^{2a} R, 3/2 |grad Z|^2, F term
  double bulk = 0;
  double imbalance = 0, relative = 0;
};

// Both sides of the integrated scalar curvature identity on
// Omega = {rho > s1, |x| < 2 / s3, |x - z_n| > s2} for the Brill data g
// against the harmonic g_o.  level >= 1 scales the quadrature.
DivergenceReport divergence_identity_check(const BrillSampler& g, const BrillSampler& g_o, double beta_ell,
                                           const std::vector<double>& turning_points, const Margins& m,
                                           int level = 1);

}  // namespace iml
