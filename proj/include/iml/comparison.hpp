#pragma once

#include <vector>

#include "iml/defects.hpp"
#include "iml/mass.hpp"

namespace iml {

struct PForms {
  double reduced = 0;  // M - s + 2 s log(2s/(s+M)), s = sqrt(M^2 - c1)
  double x_form = 0;   // 2 e^{-x} s (1 - e^x + x e^x), e^x = 2s/(s+M)
  double full(double ell) const;  // 4 pi ell * reduced
};

// Throws std::domain_error outside c1 <= M^2, M + sqrt(M^2 - c1) > 0, and
// std::runtime_error if the two forms disagree beyond 1e-12.
PForms rn_vs_schwarzschild_P(double M, double c1);

// Schwarzschild partner of an RN geometry: mass sqrt(M^2 - c1), same ell.
Family schwarzschild_partner(const Family& rn);

struct GapOptions {
  bool flux_masses = true;  // closed forms otherwise
  double tol = 2e-3;        // relative
  DefectOptions defects;
  std::vector<double> radii;
};

struct TheoremGapReport {
  double mass_g = 0, mass_o = 0, defect_term = 0, slack = 0;
  double exact_mass_g = 0, exact_mass_o = 0;
  double tol = 0;
  bool equality = false;
  double max_h2_distance = 0;
  MassEstimate flux_g, flux_o;
  std::vector<DefectProfile> profiles_g, profiles_o;
};

// Refuses pairs with different rod data or asymptotic class.
TheoremGapReport theorem_gap(const Family& g, const Family& o, const GapOptions& opt = {});

double bold_mass(double mass, const std::vector<DefectProfile>& profiles);
double bold_mass(const Family& f, const DefectOptions& opt = {});

}  // namespace iml
