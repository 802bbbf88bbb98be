#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>

#include "iml/rod_model.hpp"

namespace iml {

enum class FamilyTag {
  FlatALE,
  FlatALF,
  FlatAF,
  EuclideanR4,
  Kerr,
  Schwarzschild,
  ReissnerNordstrom,
  TaubNUT,
  TaubBolt,
  ChargedTaubBolt,
  EguchiHanson,
  ChenTeoAsymptotic
};

// Validated parameter record with derived constants.  Build through the
// make_* functions; all lengths are in the family's native units.
struct Family {
  FamilyTag tag = FamilyTag::FlatAF;
  double r_plus = 0, a = 0, c1 = 0, ell = 1, M = 0, beta = 0;
  double kappa = 0, xi = 0;
  long p = 1, q = 0, k = 1;
  bool h_modified = false;
  bool ell_override = false;

  // Unified prolate chart: rho = L sqrt(x^2 - s^2) sin(tau), z = L x cos(tau),
  // with x = r - shift (or r^2) and tau = theta (or 2 theta).
  double chart_L = 1, chart_s = 0, shift = 0;
  bool squared = false;

  std::string name() const;
  bool has_sampler() const { return tag != FamilyTag::ChenTeoAsymptotic; }
};

Family make_flat_ale(long p, long q);
Family make_flat_alf(long k, double ell, double beta = 0.0, bool h_modified = false);
Family make_flat_af(double beta, double ell);
Family make_euclidean();
Family make_kerr(double r_plus, double a);
Family make_schwarzschild(double M);
// ell <= 0 selects the regular value r_+^3 * 2 / (r_+^2 - c1).
Family make_rn(double r_plus, double c1, double ell = 0.0);
// Parametrized by (M, c1) with r_+ = M + sqrt(M^2 - c1).
Family make_rn_mc(double M, double c1, double ell = 0.0);
Family make_taub_nut(double ell);
Family make_taub_bolt(double ell);
Family make_charged_taub_bolt(double r_plus, double ell);
Family make_eguchi_hanson(double a);
Family make_chen_teo(double kappa, double xi);

// key=value records, e.g. family=kerr, r_plus=2, a=1.
Family family_from_kv(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> read_kv_file(const std::string& path);
// Derived constants (M, ell, beta, turning points, ...) for reporting.
std::map<std::string, double> derived_constants(const Family& f);

// Stable point of the prolate chart.
struct ChartPoint {
  double x = 0, xms = 0, xps = 0, f = 0;  // x, x - s, x + s, x^2 - s^2
  double cos_t = 1, sin_t = 0, omc = 0, opc = 2;  // cos, sin, 1 - cos, 1 + cos of tau
};

ChartPoint invert_chart(const Family& f, double rho, double z);
ChartPoint chart_from_polar(const Family& f, double r, double theta);

struct BrillSample {
  double rho = 0, z = 0;
  double alpha = 0;
  Eigen::Matrix2d G = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();  // A(i, a) = A^i_a, a = 0 (rho), 1 (z)
  // Optional G = lam[0] w[0] w[0]^T + lam[1] w[1] w[1]^T, used to evaluate
  // quadratic forms without cancellation.
  bool has_frames = false;
  double lam[2] = {0, 0};
  Eigen::Vector2d w[2] = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};

  double form(const Eigen::Vector2d& u, const Eigen::Vector2d& v) const;
};

// Family chart (r, theta) -> (rho, z).  Throws std::domain_error below the
// horizon, bolt or origin.
std::pair<double, double> coordinate_transform(const Family& f, double r, double theta);
std::pair<double, double> inverse_transform(const Family& f, double rho, double z);
// Model chart of an asymptotic class: ALE uses (r^2/2p)(sin 2 theta, cos 2 theta),
// ALF/AF use ell r (sin theta, cos theta).
std::pair<double, double> coordinate_transform(const AsymptoticClass& c, double r, double theta);

BrillSample sample_brill(const Family& f, double rho, double z);
BrillSample sample_chart(const Family& f, const ChartPoint& c, double rho, double z);
// G(v, v) evaluated without cancellation on the rod where v degenerates.
double torus_norm2(const Family& f, double rho, double z, const RodStructure& v);

RodDataSet family_rod_data(const Family& f);
double exact_mass(const Family& f);
// Model class used for the flux mass of each family.
AsymptoticClass default_model(const Family& f);
// Flat (or h-modified) model geometry as a sampled family.
Family model_family(const AsymptoticClass& c);
// beta * ell of the reduction branch appropriate to the class.
double reduction_beta_ell(const AsymptoticClass& c);

// Chen-Teo closed forms.
struct ChenTeoForms {
  double ell = 0, beta = 0;
  double mass_raw = 0;        // 2 pi ell (1+2xi^2)^2 sqrt(kappa) / sqrt(1-4xi^4)
  double mass_substituted = 0;  // ell eliminated
  double mass_coefficients = 0; // 2 pi ell (4 c_alpha - c_V)
  double c_alpha = 0, c_V = 0;
};
ChenTeoForms chen_teo_forms(double kappa, double xi);

// Kerr mass in its two closed forms.
std::pair<double, double> kerr_mass_forms(double r_plus, double a);

}  // namespace iml
