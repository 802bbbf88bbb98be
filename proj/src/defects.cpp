#include "iml/defects.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "iml/mass.hpp"
#include "iml/numerics.hpp"

namespace iml {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* rod_case_name(RodCase c) {
  switch (c) {
    case RodCase::I: return "I";
    case RodCase::II0: return "II0";
    case RodCase::IIbeta: return "IIbeta";
    case RodCase::III: return "III";
  }
  return "?";
}

RodCase rod_case(const RodStructure& v, double beta_ell) {
  if (!valid_rod_structure(v)) throw std::invalid_argument("rod_case: invalid rod structure");
  if (v.v2 == 0) return RodCase::I;
  if (v.v1 == 0) return beta_ell == 0.0 ? RodCase::II0 : RodCase::IIbeta;
  return RodCase::III;
}

DefectSource defect_source(const Family& f) {
  DefectSource s;
  s.sample = family_sampler(f);
  s.norm2 = [f](double rho, double z, const RodStructure& v) { return torus_norm2(f, rho, z, v); };
  s.beta_ell = reduction_beta_ell(default_model(f));
  return s;
}

DefectSource defect_source(const BrillSampler& smp, double beta_ell) {
  DefectSource s;
  s.sample = smp;
  s.norm2 = [smp](double rho, double z, const RodStructure& v) {
    const Eigen::Vector2d u(double(v.v1), double(v.v2));
    return smp(rho, z).form(u, u);
  };
  s.beta_ell = beta_ell;
  return s;
}

namespace {

double case_identity(RodCase c, const RodStructure& v, double rho, const Potentials& p, double beta_ell) {
  const double base = std::log(rho) + 2 * p.alpha - p.Z;
  switch (c) {
    case RodCase::I: return 0.5 * (base - p.V);
    case RodCase::II0: return 0.5 * (base + p.V);
    case RodCase::IIbeta: return 0.5 * (base - p.W - std::log(2 * beta_ell));
    case RodCase::III: {
      const double lc = std::fabs(p.W) + std::log1p(std::exp(-2 * std::fabs(p.W))) - std::log(2.0);
      return 0.5 * (base + p.V + lc - 2 * std::log(std::fabs(double(v.v2))));
    }
  }
  return 0;
}

}  // namespace

DefectValue angle_defect_at(const DefectSource& s, const RodStructure& v, double z, double corner_distance,
                            const DefectOptions& opt) {
  if (opt.rho.size() != opt.exponents.size() + 1)
    throw std::invalid_argument("angle_defect_at: need one more rho sample than exponents");
  const RodCase c = rod_case(v, s.beta_ell);
  const double scale = std::pow(std::min(1.0, corner_distance), 2);
  std::vector<double> h, fa, fb;
  for (double r0 : opt.rho) {
    const double rho = r0 * scale;
    const BrillSample b = s.sample(rho, z);
    const double n2 = s.norm2(rho, z, v);
    if (!(n2 > 0)) throw std::domain_error("angle_defect_at: G(v,v) is not positive off the axis");
    const Potentials p = potentials(b, s.beta_ell);
    h.push_back(rho);
    fa.push_back(std::log(rho) + b.alpha - 0.5 * std::log(n2));
    fb.push_back(case_identity(c, v, rho, p, s.beta_ell));
  }
  DefectValue d;
  d.rod_case = c;
  d.limit = richardson(h, fa, opt.exponents);
  d.identity = richardson(h, fb, opt.exponents);
  if (!(std::fabs(d.limit - d.identity) <= opt.agreement))
    throw std::runtime_error("angle_defect_at: limit " + std::to_string(d.limit) + " and case " +
                             rod_case_name(c) + " identity " + std::to_string(d.identity) +
                             " disagree; wrong rod structure or non-conical singularity");
  return d;
}

namespace {

double corner_distance(const RodDataSet& rods, double z) {
  double d = std::numeric_limits<double>::infinity();
  for (double t : rods.turning_points) d = std::min(d, std::fabs(z - t));
  return d;
}

void rod_interval(const RodDataSet& rods, std::size_t n, double T, double& lo, double& hi, bool& finite) {
  const std::size_t N = rods.turning_points.size();
  finite = n > 0 && n < N;
  lo = n == 0 ? -T : rods.turning_points[n - 1];
  hi = n == N ? T : rods.turning_points[n];
  if (n == 0 && N) lo = std::min(lo, hi - 1.0);
  if (n == N && N) hi = std::max(hi, lo + 1.0);
}

// Geometric breakpoints from an end z0 out to distance D.
std::vector<double> tail_breaks(double z0, double D, int dir) {
  std::vector<double> b{0.0};
  for (double d = 1e-2; d < D; d *= 10) b.push_back(d);
  b.push_back(D);
  std::vector<double> out;
  for (double d : b) out.push_back(z0 + dir * d);
  if (dir < 0) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

DefectValue angle_defect_at(const Family& f, std::size_t rod_index, double z, const DefectOptions& opt) {
  const RodDataSet rods = family_rod_data(f);
  if (rod_index >= rods.rods.size()) throw std::invalid_argument("angle_defect_at: rod index out of range");
  double lo, hi;
  bool fin;
  rod_interval(rods, rod_index, opt.truncation, lo, hi, fin);
  if (!(z > lo && z < hi) && (fin || (rod_index == 0 ? z >= hi : z <= lo)))
    throw std::invalid_argument("angle_defect_at: z is not interior to the rod");
  return angle_defect_at(defect_source(f), rods.rods[rod_index], z, corner_distance(rods, z), opt);
}

std::vector<DefectProfile> defect_profiles(const DefectSource& s, const RodDataSet& rods, const DefectOptions& opt) {
  std::vector<DefectProfile> out;
  const std::size_t N = rods.turning_points.size();
  for (std::size_t n = 0; n < rods.rods.size(); ++n) {
    DefectProfile p;
    p.rod_index = n;
    p.rod_case = rod_case(rods.rods[n], s.beta_ell);
    rod_interval(rods, n, opt.truncation, p.z_lo, p.z_hi, p.finite);
    QuadRule q;
    if (p.finite) {
      q = gauss_legendre(opt.quad_points, p.z_lo, p.z_hi);
    } else if (N == 0) {
      q = composite_gauss({-opt.truncation, 0.0, opt.truncation}, opt.quad_points);
      p.z_lo = -opt.truncation;
      p.z_hi = opt.truncation;
    } else if (n == 0) {
      q = composite_gauss(tail_breaks(p.z_hi, p.z_hi - p.z_lo, -1), opt.quad_points);
    } else {
      q = composite_gauss(tail_breaks(p.z_lo, p.z_hi - p.z_lo, +1), opt.quad_points);
    }
    p.samples.resize(q.x.size());
    p.weights = q.w;
    parallel_for(q.x.size(), [&](std::size_t i) {
      const double z = q.x[i];
      p.samples[i] = {z, angle_defect_at(s, rods.rods[n], z, corner_distance(rods, z), opt).limit};
    });
    KahanSum sum;
    for (std::size_t i = 0; i < q.x.size(); ++i) sum.add(q.w[i] * p.samples[i].second);
    p.integral = sum.value();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<DefectProfile> defect_profiles(const Family& f, const DefectOptions& opt) {
  return defect_profiles(defect_source(f), family_rod_data(f), opt);
}

double defect_term(const std::vector<DefectProfile>& g, const std::vector<DefectProfile>& o) {
  if (g.size() != o.size()) throw std::invalid_argument("defect_term: rod count mismatch");
  KahanSum total;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const DefectProfile& a = g[n];
    const DefectProfile& b = o[n];
    const double tol = 1e-12 * std::max({1.0, std::fabs(a.z_lo), std::fabs(a.z_hi)});
    if (a.finite != b.finite || a.samples.size() != b.samples.size() || std::fabs(a.z_lo - b.z_lo) > tol ||
        std::fabs(a.z_hi - b.z_hi) > tol)
      throw std::invalid_argument("defect_term: rod " + std::to_string(n) + " differs between the geometries");
    if (!a.finite) {
      // Decay test over the two outermost samples.
      const std::size_t m = a.samples.size();
      const std::size_t i1 = n == 0 ? 0 : m - 1, i0 = n == 0 ? 1 : m - 2;
      const double d1 = std::fabs(a.samples[i1].second - b.samples[i1].second);
      const double d0 = std::fabs(a.samples[i0].second - b.samples[i0].second);
      if (d1 > 1e-10) {
        const double z1 = std::fabs(a.samples[i1].first), z0 = std::fabs(a.samples[i0].first);
        const double slope = (z1 > z0 && d0 > 0) ? std::log(d1 / d0) / std::log(z1 / z0) : 0.0;
        if (!(slope < -1.0))
          throw std::runtime_error("defect_term: defect difference on rod " + std::to_string(n) +
                                   " is not integrable");
      }
    }
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      total.add(a.weights[i] * (a.samples[i].second - b.samples[i].second));
  }
  return 2 * kPi * total.value();
}

double finite_defect_integral(const std::vector<DefectProfile>& g) {
  KahanSum s;
  for (const auto& p : g)
    if (p.finite) s.add(p.integral);
  return s.value();
}

double corner_flux(const BrillSampler& g, const BrillSampler& o, double beta_ell, double z_n, double sigma,
                   double neighbour_distance, std::size_t quad_points) {
  const double R = 0.5 * sigma * sigma;
  if (!(R < neighbour_distance)) throw std::invalid_argument("corner_flux: ball overlaps an adjacent corner");
  const QuadRule q = gauss_legendre(quad_points, 0.0, kPi);
  const double h = 1e-3 * R;
  return 2 * kPi * integrate(q, [&](double psi) {
           const double sp = std::sin(psi), cp = std::cos(psi);
           const Eigen::Vector2d nu(-sp, -cp);
           return x_directional(g, o, beta_ell, R * sp, z_n + R * cp, nu, h) * R * R * sp;
         });
}

double rn_defect_closed_form(const Family& f) {
  if (f.tag != FamilyTag::ReissnerNordstrom && f.tag != FamilyTag::Schwarzschild)
    throw std::invalid_argument("rn_defect_closed_form: not an RN geometry");
  const double rp = f.M + f.chart_s, s = f.chart_s;
  return 0.5 * std::log(std::pow(rp, 4) / (f.ell * f.ell * s * s));
}

double rn_defect_turning_point_form(const Family& f) {
  if (f.tag != FamilyTag::ReissnerNordstrom && f.tag != FamilyTag::Schwarzschild)
    throw std::invalid_argument("rn_defect_turning_point_form: not an RN geometry");
  const RodDataSet r = family_rod_data(f);
  const double z1 = r.turning_points[0], z2 = r.turning_points[1], l = f.ell;
  const double c1 = f.M * f.M - f.chart_s * f.chart_s;
  const double L = z2 - z1;
  return 0.5 * std::log(std::pow(L + 2 * std::sqrt(z2 * z2 + l * l * c1), 4) / (4 * std::pow(l, 4) * L * L));
}

}  // namespace iml
