#include "iml/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "iml/numerics.hpp"

namespace iml {

std::pair<ReducedFields, HyperbolicPoint> reduce_torus_matrix(const Eigen::Matrix2d& G, double rho,
                                                              double beta_ell) {
  if (!(rho > 0)) throw std::domain_error("reduce_torus_matrix: rho must be positive");
  const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
  if (!(G(0, 0) > 0) || !(det > 0)) throw std::domain_error("reduce_torus_matrix: G not positive definite");
  const double sd = std::sqrt(det);
  ReducedFields r;
  r.Z = std::log(sd / rho);
  r.Phi = G / sd;
  r.Phi(1, 0) = r.Phi(0, 1);
  r.beta_ell = beta_ell;
  const double p11 = r.Phi(0, 0), p12 = r.Phi(0, 1), p22 = r.Phi(1, 1);
  HyperbolicPoint h;
  if (beta_ell == 0.0) {
    h.V = 0.5 * std::log(p11 / p22);
    h.W = std::asinh(p12);
  } else {
    const double b = beta_ell;
    // p22 - 2 b p12 + b^2 p11 = e^{-V} cosh W, positive for SPD Phi.
    h.V = 0.5 * std::log(p11 / (p22 - 2 * b * p12 + b * b * p11));
    h.W = std::asinh(p12 - b * p11);
  }
  return {r, h};
}

std::pair<ReducedFields, HyperbolicPoint> reduce_sample(const BrillSample& b, double beta_ell) {
  if (!b.has_frames) return reduce_torus_matrix(b.G, b.rho, beta_ell);
  if (!(b.rho > 0)) throw std::domain_error("reduce_torus_matrix: rho must be positive");
  const double cross = b.w[0](0) * b.w[1](1) - b.w[0](1) * b.w[1](0);
  const double det = b.lam[0] * b.lam[1] * cross * cross;
  if (!(b.lam[0] > 0) || !(b.lam[1] > 0) || !(det > 0))
    throw std::domain_error("reduce_torus_matrix: G not positive definite");
  const double sd = std::sqrt(b.lam[0] * b.lam[1]) * std::fabs(cross);
  std::pair<ReducedFields, HyperbolicPoint> out;
  out.first.Z = std::log(sd / b.rho);
  out.first.Phi = b.G / sd;
  out.first.beta_ell = beta_ell;
  // Phi(u,u) = e^{-V} cosh W and Phi(e1,u) = sinh W, u = (-beta_ell, 1).
  const Eigen::Vector2d e1(1, 0), u(-beta_ell, 1);
  out.second.V = 0.5 * std::log(b.form(e1, e1) / b.form(u, u));
  out.second.W = std::asinh(b.form(e1, u) / sd);
  return out;
}

Eigen::Matrix2d phi_from_vw(const HyperbolicPoint& p, double b) {
  const double ev = std::exp(p.V), ch = std::cosh(p.W), sh = std::sinh(p.W);
  Eigen::Matrix2d P;
  P(0, 0) = ev * ch;
  P(0, 1) = P(1, 0) = sh + b * ev * ch;
  P(1, 1) = (1.0 / ev + b * b * ev) * ch + 2 * b * sh;
  return P;
}

Eigen::Matrix2d reconstruct_torus_matrix(const HyperbolicPoint& p, double Z, double rho, double beta_ell) {
  if (!(rho > 0)) throw std::domain_error("reconstruct_torus_matrix: rho must be positive");
  return rho * std::exp(Z) * phi_from_vw(p, beta_ell);
}

double h2_distance(const HyperbolicPoint& p, const HyperbolicPoint& q) {
  const double sv = std::sinh(0.5 * (p.V - q.V)), sw = std::sinh(0.5 * (p.W - q.W));
  // cosh d - 1 = 2 sinh^2(d/2), assembled without cancellation.
  const double chv = 1 + 2 * sv * sv;
  const double cm = 2 * sw * sw * chv + 2 * sv * sv * (1 + std::sinh(p.W) * std::sinh(q.W));
  if (!(cm > 0)) return 0.0;
  return 2 * std::asinh(std::sqrt(0.5 * cm));
}

double h2_energy_density(const Eigen::Vector2d& gradV, const Eigen::Vector2d& gradW, double W) {
  const double c = std::cosh(W);
  return c * c * gradV.squaredNorm() + gradW.squaredNorm();
}

BrillSampler family_sampler(const Family& f) {
  return [f](double rho, double z) { return sample_brill(f, rho, z); };
}

namespace {

struct Reduced {
  double alpha, Z, V, W;
  Eigen::Matrix2d G, A;
};

// Z and (V, W) through the sample's frames, so that neither det G nor the
// inverse of Phi is formed near the axis.
Reduced curvature_fields(const BrillSample& b) {
  const auto [rf, p] = reduce_sample(b, 0.0);
  Reduced r;
  r.alpha = b.alpha;
  r.Z = rf.Z;
  r.V = p.V;
  r.W = p.W;
  r.G = b.G;
  r.A = b.A;
  return r;
}

}  // namespace

double scalar_density(const BrillSampler& s, double rho, double z, double h) {
  if (!(rho > 2 * h)) throw std::domain_error("scalar_curvature: stencil leaves the half-plane");
  const Reduced c = curvature_fields(s(rho, z));
  const Reduced rp = curvature_fields(s(rho + h, z));
  const Reduced rm = curvature_fields(s(rho - h, z));
  const Reduced zp = curvature_fields(s(rho, z + h));
  const Reduced zm = curvature_fields(s(rho, z - h));
  const double h2 = h * h, i2h = 0.5 / h;

  auto lap = [&](double Reduced::*m) {
    return (rp.*m - 2 * (c.*m) + rm.*m) / h2 + (rp.*m - rm.*m) * i2h / rho + (zp.*m - 2 * (c.*m) + zm.*m) / h2;
  };
  auto grad2 = [&](double Reduced::*m) {
    const double a = (rp.*m - rm.*m) * i2h, b = (zp.*m - zm.*m) * i2h;
    return a * a + b * b;
  };
  const double a_r = (rp.alpha - rm.alpha) * i2h;
  const double Z_r = (rp.Z - rm.Z) * i2h;

  // 1/4 tr (Phi^{-1} dPhi)^2 is the hyperbolic energy density / 2.
  const double ch = std::cosh(c.W);
  const double trj4 = 0.5 * (ch * ch * grad2(&Reduced::V) + grad2(&Reduced::W));

  // F^i = d_rho A^i_z - d_z A^i_rho.
  Eigen::Vector2d F;
  for (int i = 0; i < 2; ++i) F(i) = (rp.A(i, 1) - rm.A(i, 1)) * i2h - (zp.A(i, 0) - zm.A(i, 0)) * i2h;
  const double GFF = F.dot(c.G * F);

  const double ilr = 1.0 / rho;
  return -2 * lap(&Reduced::alpha) + 2 * a_r * ilr - trj4 - 0.5 * std::exp(-2 * c.alpha) * GFF -
         2 * lap(&Reduced::Z) - 1.5 * grad2(&Reduced::Z) - Z_r * ilr + 0.5 * ilr * ilr;
}

double scalar_curvature(const BrillSampler& s, double rho, double z, double h) {
  const double d = scalar_density(s, rho, z, h);
  return d * std::exp(-2 * s(rho, z).alpha);
}

double scalar_curvature_extrapolated(const BrillSampler& s, double rho, double z, double h) {
  if (!(h > 0)) h = 5e-3 * rho;
  const double d = (4 * scalar_density(s, rho, z, 0.5 * h) - scalar_density(s, rho, z, h)) / 3;
  return d * std::exp(-2 * s(rho, z).alpha);
}

std::vector<std::pair<double, double>> bulk_sample_points(const Family& f, int n, unsigned long long seed) {
  const RodDataSet rods = family_rod_data(f);
  double scale = 1.0;
  for (double t : rods.turning_points) scale = std::max(scale, std::fabs(t));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(0.05, 3.0), uz(-3.0, 3.0);
  std::vector<std::pair<double, double>> out;
  while (int(out.size()) < n) {
    const double rho = ur(rng) * scale, z = uz(rng) * scale;
    bool near = false;
    for (double t : rods.turning_points) near = near || std::hypot(rho, z - t) < 0.05 * scale;
    if (!near) out.push_back({rho, z});
  }
  return out;
}

Eigen::Vector2d alpha_gradient(const TorusSampler& G, double rho, double z) {
  const double h = default_step(rho);
  if (!(rho > 2 * h)) throw std::domain_error("alpha_gradient: too close to the axis");
  auto d = [&](double dr, double dz) {
    return (-G(rho + 2 * h * dr, z + 2 * h * dz) + 8.0 * G(rho + h * dr, z + h * dz) -
            8.0 * G(rho - h * dr, z - h * dz) + G(rho - 2 * h * dr, z - 2 * h * dz)) /
           (12 * h);
  };
  const Eigen::Matrix2d Gi = G(rho, z).inverse();
  const Eigen::Matrix2d jr = Gi * d(1, 0), jz = Gi * d(0, 1);
  Eigen::Vector2d g;
  g(0) = -0.5 / rho + 0.125 * rho * (jr * jr - jz * jz).trace();
  g(1) = 0.25 * rho * (jz * jr).trace();
  return g;
}

double model_alpha(const AsymptoticClass& c, double rho, double z) {
  if (c.kind == AsymptoticKind::ALE) return 0.5 * std::log(double(c.p) / (2 * std::hypot(rho, z)));
  return -std::log(c.ell);
}

namespace {

// Trapezoid of f on [0,1] with n and 2n panels, Richardson-combined.
double trapezoid_rich(const std::function<double(double)>& f, int n) {
  std::vector<double> vals(2 * n + 1);
  for (int i = 0; i <= 2 * n; ++i) vals[i] = f(double(i) / (2 * n));
  KahanSum fine, coarse;
  for (int i = 0; i <= 2 * n; ++i) {
    const double w = (i == 0 || i == 2 * n) ? 0.5 : 1.0;
    fine.add(w * vals[i]);
    if (i % 2 == 0) coarse.add(w * vals[i]);
  }
  const double tf = fine.value() / (2 * n), tc = coarse.value() / n;
  return (4 * tf - tc) / 3;
}

// Integral of grad alpha along the straight segment (r0,z0) -> (r1,z1).
double segment(const TorusSampler& G, double r0, double z0, double r1, double z1, int n) {
  if (r0 == r1 && z0 == z1) return 0.0;
  return trapezoid_rich(
      [&](double t) {
        const Eigen::Vector2d g = alpha_gradient(G, r0 + t * (r1 - r0), z0 + t * (z1 - z0));
        return g(0) * (r1 - r0) + g(1) * (z1 - z0);
      },
      n);
}

// Ray from radius R0 to R1 at fixed direction (sin t, cos t), log spaced.
double ray(const TorusSampler& G, double R0, double R1, double st, double ct, int n) {
  const double l0 = std::log(R0), l1 = std::log(R1);
  return trapezoid_rich(
      [&](double t) {
        const double R = std::exp(l0 + t * (l1 - l0));
        const Eigen::Vector2d g = alpha_gradient(G, R * st, R * ct);
        return (g(0) * st + g(1) * ct) * R * (l1 - l0);
      },
      n);
}

}  // namespace

double alpha_from_phi(const TorusSampler& G, const AsymptoticClass& c, double rho, double z,
                      const AlphaOptions& opt) {
  if (!(rho > 0)) throw std::domain_error("alpha_from_phi: point on the axis");
  const double Rf = opt.far_radius;
  if (opt.path == AlphaPath::ZFirst) {
    const double leg = segment(G, rho, 0.0, rho, z, opt.segments);
    const double out = ray(G, rho, Rf, 1.0, 0.0, opt.segments);
    return model_alpha(c, Rf, 0.0) - out + leg;
  }
  const double R = std::hypot(rho, z);
  const double out = ray(G, R, Rf, rho / R, z / R, opt.segments);
  return model_alpha(c, Rf * rho / R, Rf * z / R) - out;
}

double alpha_path_defect(const TorusSampler& G, const AsymptoticClass& c, double rho, double z,
                         const AlphaOptions& opt) {
  AlphaOptions a = opt, b = opt;
  a.path = AlphaPath::ZFirst;
  b.path = AlphaPath::Ray;
  return std::fabs(alpha_from_phi(G, c, rho, z, a) - alpha_from_phi(G, c, rho, z, b));
}

void write_field_csv(std::ostream& out, const FieldHeader& h, const std::vector<FieldRow>& rows) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# class=%s beta=%.17g ell=%.17g grid=%dx%d\n", h.model.c_str(), h.beta,
                h.ell, h.n_rho, h.n_z);
  out << buf << "rho,z,V,W,Z,alpha\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.rho, r.z, r.V, r.W, r.Z, r.alpha);
    out << buf;
  }
}

std::vector<FieldRow> read_field_csv(std::istream& in, FieldHeader* h) {
  std::vector<FieldRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (h) {
        std::istringstream ls(line.substr(1));
        std::string tok;
        while (ls >> tok) {
          const auto eq = tok.find('=');
          if (eq == std::string::npos) continue;
          const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
          if (k == "class") h->model = v;
          else if (k == "beta") h->beta = std::strtod(v.c_str(), nullptr);
          else if (k == "ell") h->ell = std::strtod(v.c_str(), nullptr);
          else if (k == "grid") std::sscanf(v.c_str(), "%dx%d", &h->n_rho, &h->n_z);
        }
      }
      continue;
    }
    if (line.rfind("rho,", 0) == 0) continue;
    FieldRow r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &r.rho, &r.z, &r.V, &r.W, &r.Z, &r.alpha) != 6)
      throw std::invalid_argument("field csv: malformed row '" + line + "'");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace iml
