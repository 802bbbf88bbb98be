#include "iml/comparison.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iml {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double PForms::full(double ell) const { return 4 * kPi * ell * reduced; }

PForms rn_vs_schwarzschild_P(double M, double c1) {
  if (!(c1 <= M * M)) throw std::domain_error("P: need c1 <= M^2");
  const double s = std::sqrt(M * M - c1);
  if (!(s + M > 0)) throw std::domain_error("P: need r_+ = M + sqrt(M^2 - c1) > 0");
  PForms p;
  if (s == 0.0) {
    p.reduced = p.x_form = M;
    return p;
  }
  const double ratio = 2 * s / (s + M);  // e^x
  const double x = std::log(ratio);
  p.reduced = M - s + 2 * s * x;
  // 2 e^{-x} s = s + M.
  p.x_form = (s + M) * (1 - ratio + x * ratio);
  const double scale = std::max({1.0, std::fabs(M), s});
  if (std::fabs(p.reduced - p.x_form) > 1e-12 * scale)
    throw std::runtime_error("P: direct and x forms disagree");
  return p;
}

Family schwarzschild_partner(const Family& rn) {
  if (rn.tag != FamilyTag::ReissnerNordstrom && rn.tag != FamilyTag::Schwarzschild)
    throw std::invalid_argument("schwarzschild_partner: not an RN geometry");
  return make_rn_mc(rn.chart_s, 0.0, rn.ell);
}

namespace {

bool same_rods(const RodDataSet& a, const RodDataSet& b) {
  if (a.rods != b.rods || a.turning_points.size() != b.turning_points.size()) return false;
  for (std::size_t i = 0; i < a.turning_points.size(); ++i) {
    const double t = 1e-12 * std::max({1.0, std::fabs(a.turning_points[i]), std::fabs(b.turning_points[i])});
    if (std::fabs(a.turning_points[i] - b.turning_points[i]) > t) return false;
  }
  return true;
}

bool same_class(const AsymptoticClass& a, const AsymptoticClass& b) {
  if (a.kind != b.kind) return false;
  const auto close = [](double x, double y) { return std::fabs(x - y) <= 1e-12 * std::max(1.0, std::fabs(x)); };
  switch (a.kind) {
    case AsymptoticKind::ALE: return a.p == b.p && a.q == b.q;
    case AsymptoticKind::ALF: return a.k == b.k && close(a.ell, b.ell) && a.h_modified == b.h_modified;
    case AsymptoticKind::AF: return close(a.ell, b.ell) && close(a.beta, b.beta);
  }
  return false;
}

double sup_h2_distance(const Family& g, const Family& o, double beta_ell) {
  double d = 0;
  const double L = g.chart_L;
  for (double r : {0.5, 1.0, 2.0, 4.0})
    for (double z : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
      const auto a = reduce_sample(sample_brill(g, r * L, z * L), beta_ell).second;
      const auto b = reduce_sample(sample_brill(o, r * L, z * L), beta_ell).second;
      d = std::max(d, h2_distance(a, b));
    }
  return d;
}

}  // namespace

TheoremGapReport theorem_gap(const Family& g, const Family& o, const GapOptions& opt) {
  if (!g.has_sampler() || !o.has_sampler())
    throw std::invalid_argument("theorem_gap: both geometries need samplers");
  if (!same_rods(family_rod_data(g), family_rod_data(o)))
    throw std::invalid_argument("theorem_gap: rod data sets differ; refusing to compare");
  const AsymptoticClass c = default_model(g);
  if (!same_class(c, default_model(o)))
    throw std::invalid_argument("theorem_gap: asymptotic classes differ; refusing to compare");

  TheoremGapReport rep;
  rep.exact_mass_g = exact_mass(g);
  rep.exact_mass_o = exact_mass(o);
  if (opt.flux_masses) {
    rep.flux_g = estimate_mass(g, c, opt.radii);
    rep.flux_o = estimate_mass(o, c, opt.radii);
    rep.mass_g = rep.flux_g.extrapolated;
    rep.mass_o = rep.flux_o.extrapolated;
  } else {
    rep.mass_g = rep.exact_mass_g;
    rep.mass_o = rep.exact_mass_o;
  }
  rep.profiles_g = defect_profiles(g, opt.defects);
  rep.profiles_o = defect_profiles(o, opt.defects);
  rep.defect_term = defect_term(rep.profiles_g, rep.profiles_o);
  rep.slack = (rep.mass_g - rep.mass_o) - rep.defect_term;
  rep.tol = opt.tol * std::max({1.0, std::fabs(rep.mass_g), std::fabs(rep.mass_o)});
  rep.max_h2_distance = sup_h2_distance(g, o, reduction_beta_ell(c));
  rep.equality = std::fabs(rep.slack) <= rep.tol && rep.max_h2_distance <= 1e-8;
  return rep;
}

double bold_mass(double mass, const std::vector<DefectProfile>& profiles) {
  return mass - 2 * kPi * finite_defect_integral(profiles);
}

double bold_mass(const Family& f, const DefectOptions& opt) {
  return bold_mass(exact_mass(f), defect_profiles(f, opt));
}

}  // namespace iml
