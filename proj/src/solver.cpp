#include "iml/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace iml {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2 * kPi;

std::string num(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

// sqrt(rho^2 + d^2) - |d| compensated when d > 0.
double gap(double rho, double d) {
  const double R = std::hypot(rho, d);
  return d > 0 ? rho * rho / (R + d) : R - d;
}

}  // namespace

HyperbolicPoint ModelMap::value(double rho, double z) const {
  const ModelJet j = jet(rho, z);
  return {j.V, j.W};
}

namespace {

bool diagonal(const RodStructure& v) {
  return (std::abs(v.v1) == 1 && v.v2 == 0) || (v.v1 == 0 && std::abs(v.v2) == 1);
}

ModelMap weyl_model(const RodDataSet& rods, const AsymptoticClass& c) {
  struct Seg {
    double a, b;
  };
  std::vector<Seg> segs;
  for (std::size_t n = 1; n + 1 < rods.rods.size(); ++n)
    if (rods.rods[n].v1 == 0) segs.push_back({rods.turning_points[n - 1], rods.turning_points[n]});
  const double logl2 = 2 * std::log(c.ell);
  ModelMap m;
  m.rods = rods;
  m.cls = c;
  m.beta_ell = 0;
  std::ostringstream d;
  d << "weyl AF(0," << num(c.ell) << ")";
  for (const Seg& s : segs) d << " [" << num(s.a) << "," << num(s.b) << "]";
  m.description = d.str();
  m.jet = [segs, logl2](double rho, double z) {
    ModelJet j;
    j.V = std::log(rho) - logl2;
    j.dV = {1.0 / rho, 0.0};
    for (const Seg& s : segs) {
      const double L = s.b - s.a;
      const double Ra = std::hypot(rho, z - s.a), Rb = std::hypot(rho, z - s.b);
      // R_a + R_b - L split into two non-negative pieces
      const double pm = gap(rho, z - s.a) + gap(rho, s.b - z);
      const double pp = Ra + Rb + L;
      j.V -= std::log(pm / pp);
      const double k = 2 * L / (pm * pp);
      j.dV(0) -= k * (rho / Ra + rho / Rb);
      j.dV(1) -= k * ((z - s.a) / Ra + (z - s.b) / Rb);
    }
    return j;
  };
  return m;
}

double ddiff(const double* f, double h) { return (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h); }
double d2diff(const double* f, double h) {
  return (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h);
}

std::pair<double, double> shift_span(const RodDataSet& a, const RodDataSet& b) {
  // z shift taking b onto a, and the worst residual mismatch
  if (a.turning_points.empty()) return {0.0, 0.0};
  const double s = a.turning_points.front() - b.turning_points.front();
  double e = 0;
  for (std::size_t n = 0; n < a.turning_points.size(); ++n)
    e = std::max(e, std::fabs(a.turning_points[n] - b.turning_points[n] - s));
  return {s, e};
}

bool matches(const RodDataSet& want, const Family& f, double* shift) {
  const RodDataSet have = family_rod_data(f);
  if (have.rods != want.rods || have.turning_points.size() != want.turning_points.size()) return false;
  const auto [s, e] = shift_span(want, have);
  double scale = 1.0;
  for (double t : want.turning_points) scale = std::max(scale, std::fabs(t));
  if (e > 1e-9 * scale) return false;
  *shift = s;
  return true;
}

double span(const RodDataSet& r) {
  return r.turning_points.size() < 2 ? 0.0 : r.turning_points.back() - r.turning_points.front();
}

// Kerr (r_+, a) with the given beta and ell.
Family kerr_for(double beta, double ell) {
  const auto a_of = [beta](double rp) { return (std::sqrt(1 + 4 * beta * beta * rp * rp) - 1) / (2 * beta); };
  const auto ell_of = [&](double rp) {
    const double a = a_of(rp);
    return 2 * rp * (rp * rp - a * a) / (rp * rp + a * a);
  };
  // ell_of grows from 0 while it stays in the admissible range of beta.
  double lo = 1e-12, hi = 1e-12;
  double best = 0;
  for (int n = 0; n < 200; ++n) {
    hi *= 1.25;
    const double l = ell_of(hi);
    if (l >= ell) break;
    if (l < best) throw std::invalid_argument("model map: no Kerr geometry with this beta and ell");
    best = l;
    lo = hi;
  }
  for (int n = 0; n < 200; ++n) {
    const double mid = 0.5 * (lo + hi);
    (ell_of(mid) < ell ? lo : hi) = mid;
  }
  const double rp = 0.5 * (lo + hi);
  return make_kerr(rp, a_of(rp));
}

std::vector<Family> candidates(const RodDataSet& rods, const AsymptoticClass& c) {
  std::vector<Family> out;
  const double d = span(rods);
  switch (c.kind) {
    case AsymptoticKind::ALE:
      out.push_back(make_flat_ale(c.p, c.q));
      if (c.p == 1) out.push_back(make_euclidean());
      if (c.p == 2 && c.q == 1 && d > 0) {
        const double d1 = span(family_rod_data(make_eguchi_hanson(1.0)));
        out.push_back(make_eguchi_hanson(std::sqrt(d / d1)));
      }
      break;
    case AsymptoticKind::ALF:
      if (c.k == 1 && !c.h_modified) {
        out.push_back(make_taub_nut(c.ell));
        out.push_back(make_taub_bolt(c.ell));
      }
      out.push_back(make_flat_alf(c.k, c.ell, 0.0, c.h_modified));
      break;
    case AsymptoticKind::AF:
      if (c.beta != 0) out.push_back(kerr_for(c.beta, c.ell));
      out.push_back(make_flat_af(c.beta, c.ell));
      break;
  }
  return out;
}

}  // namespace

ModelMap family_model_map(const Family& f, double z_shift) {
  if (!f.has_sampler()) throw std::invalid_argument("model map: " + f.name() + " has no sampler");
  ModelMap m;
  m.rods = family_rod_data(f);
  for (double& t : m.rods.turning_points) t += z_shift;
  m.cls = default_model(f);
  m.beta_ell = reduction_beta_ell(m.cls);
  m.description = f.name() + " shift " + num(z_shift);
  const double bl = m.beta_ell;
  m.jet = [f, z_shift, bl](double rho, double z) {
    const double zz = z - z_shift;
    const double h = std::min(default_step(rho), 0.25 * rho);
    double V[2][5], W[2][5];
    for (int k = 0; k < 5; ++k) {
      const double off = (k - 2) * h;
      HyperbolicPoint p = reduce_sample(sample_brill(f, rho + off, zz), bl).second;
      V[0][k] = p.V, W[0][k] = p.W;
      if (k == 2) {
        V[1][k] = p.V, W[1][k] = p.W;
        continue;
      }
      p = reduce_sample(sample_brill(f, rho, zz + off), bl).second;
      V[1][k] = p.V, W[1][k] = p.W;
    }
    ModelJet j;
    j.V = V[0][2], j.W = W[0][2];
    j.dV = {ddiff(V[0], h), ddiff(V[1], h)};
    j.dW = {ddiff(W[0], h), ddiff(W[1], h)};
    j.lapV = d2diff(V[0], h) + j.dV(0) / rho + d2diff(V[1], h);
    j.lapW = d2diff(W[0], h) + j.dW(0) / rho + d2diff(W[1], h);
    return j;
  };
  return m;
}

ModelMap build_model_map(const RodDataSet& rods, const AsymptoticClass& c) {
  const ValidationReport rep = validate_rod_data(rods);
  if (!rep.valid()) throw std::invalid_argument("model map: invalid rod data: " + rep.violations.front().message);
  const RodStructure& first = rods.rods.front();
  const RodStructure& last = rods.rods.back();
  if (c.kind == AsymptoticKind::AF && c.beta == 0) {
    const RodStructure e1{1, 0};
    if (!(first == e1 && last == e1))
      throw std::invalid_argument("model map: AF needs (1,0) semi-infinite rods");
    if (std::all_of(rods.rods.begin(), rods.rods.end(), diagonal)) return weyl_model(rods, c);
  }
  for (const Family& f : candidates(rods, c)) {
    double shift = 0;
    if (matches(rods, f, &shift)) return family_model_map(f, shift);
  }
  throw std::invalid_argument("model map: rod data matches no shipped harmonic model for " + c.tag());
}

SolverGrid make_grid(int n_rho, int n_z, double R, double z_max, double grading) {
  if (n_rho < 5 || n_z < 5) throw std::invalid_argument("grid: need at least 5 nodes per direction");
  if (!(R > 0 && z_max > 0 && grading >= 0)) throw std::invalid_argument("grid: bad extent or grading");
  SolverGrid g;
  g.rho.resize(n_rho);
  g.z.resize(n_z);
  for (int i = 0; i < n_rho; ++i) {
    const double xi = double(i) / (n_rho - 1);
    g.rho[i] = grading == 0 ? R * xi : R * std::sinh(grading * xi) / std::sinh(grading);
  }
  g.rho.back() = R;
  for (int j = 0; j < n_z; ++j) g.z[j] = -z_max + 2 * z_max * double(j) / (n_z - 1);
  g.z.back() = z_max;
  return g;
}

SolverGrid make_box_grid(int n_rho, int n_z, double rho_min, double rho_max, double z_min, double z_max) {
  if (n_rho < 3 || n_z < 3) throw std::invalid_argument("grid: need at least 3 nodes per direction");
  if (!(rho_min >= 0 && rho_max > rho_min && z_max > z_min)) throw std::invalid_argument("grid: bad box");
  SolverGrid g;
  g.rho.resize(n_rho);
  g.z.resize(n_z);
  for (int i = 0; i < n_rho; ++i) g.rho[i] = rho_min + (rho_max - rho_min) * double(i) / (n_rho - 1);
  for (int j = 0; j < n_z; ++j) g.z[j] = z_min + (z_max - z_min) * double(j) / (n_z - 1);
  return g;
}

void SolverConfig::validate() const {
  if (!(tolerance > 0)) throw std::invalid_argument("solver: tolerance must be positive");
  if (max_sweeps < 0) throw std::invalid_argument("solver: max_sweeps must be non-negative");
  if (!(omega > 0 && omega < 2)) throw std::invalid_argument("solver: omega must lie in (0,2)");
  if (n_rho < 5 || n_z < 5) throw std::invalid_argument("solver: grid too small");
  if (!(grading >= 0)) throw std::invalid_argument("solver: grading must be non-negative");
  if (newton_iterations < 1 || newton_iterations > 5) throw std::invalid_argument("solver: 1..5 Newton iterations");
  if (residual_every < 1) throw std::invalid_argument("solver: residual_every must be positive");
}

HyperbolicPoint HyperbolicField::value(int i, int j) const {
  const HyperbolicPoint m = model.value(grid.rho[i], grid.z[j]);
  return {m.V + u(i, j), m.W + w(i, j)};
}

FieldHeader HyperbolicField::header() const {
  FieldHeader h;
  h.model = model.cls.tag();
  h.beta = model.cls.beta;
  h.ell = model.cls.ell;
  h.n_rho = int(grid.rho.size());
  h.n_z = int(grid.z.size());
  return h;
}

std::vector<FieldRow> HyperbolicField::rows() const {
  std::vector<FieldRow> out;
  for (std::size_t j = 0; j < grid.z.size(); ++j)
    for (std::size_t i = 0; i < grid.rho.size(); ++i) {
      if (grid.rho[i] <= 0) continue;
      const HyperbolicPoint p = value(int(i), int(j));
      out.push_back({grid.rho[i], grid.z[j], p.V, p.W, 0.0, 0.0});
    }
  return out;
}

HyperbolicField make_field(const ModelMap& model, SolverGrid grid) {
  HyperbolicField f;
  f.grid = std::move(grid);
  f.model = model;
  f.u = Eigen::MatrixXd::Zero(f.grid.rho.size(), f.grid.z.size());
  f.w = f.u;
  return f;
}

HyperbolicField make_field(const ModelMap& model, const SolverConfig& cfg) {
  cfg.validate();
  double ext = 0;
  for (double t : model.rods.turning_points) ext = std::max(ext, std::fabs(t));
  const double auto_r = std::max(40.0, 10 * ext);
  return make_field(model, make_grid(cfg.n_rho, cfg.n_z, cfg.R > 0 ? cfg.R : auto_r,
                                     cfg.z_max > 0 ? cfg.z_max : auto_r, cfg.grading));
}

void load_geometry(HyperbolicField& f, const BrillSampler& s) {
  const auto& g = f.grid;
  const int nr = int(g.rho.size()), nz = int(g.z.size());
  parallel_for(nz, [&](std::size_t jj) {
    const int j = int(jj);
    for (int i = 0; i < nr; ++i) {
      if (g.rho[i] <= 0) continue;
      const HyperbolicPoint p = reduce_sample(s(g.rho[i], g.z[j]), f.model.beta_ell).second;
      const HyperbolicPoint m = f.model.value(g.rho[i], g.z[j]);
      f.u(i, j) = p.V - m.V;
      f.w(i, j) = p.W - m.W;
    }
    if (g.rho[0] <= 0) {
      // even in rho at the axis
      const double a = g.rho[1] * g.rho[1], b = g.rho[2] * g.rho[2];
      f.u(0, j) = (b * f.u(1, j) - a * f.u(2, j)) / (b - a);
      f.w(0, j) = (b * f.w(1, j) - a * f.w(2, j)) / (b - a);
    }
  });
}

namespace {

// Edge of the tensor grid with the model data at its midpoint.
struct Edge {
  int n0 = 0, n1 = 0;
  double omega = 0, inv_h = 0;
  double rho = 0, z = 0;  // model evaluation point
  double a = 0, b = 0;    // model dV, dW along the edge
  double Wm = 0, ch2 = 1, sh2 = 0;
};

struct EdgeEval {
  double e = 0, eD = 0, ewe = 0, eDw = 0;
  double hDD = 0, hDwe = 0, hwewe = 0;
};

// 1/2 sinh(2w) - w
double odd_rest(double w) {
  if (std::fabs(w) < 0.1) {
    const double w2 = w * w;
    return w * w2 * (2.0 / 3 + w2 * (2.0 / 15 + w2 * (4.0 / 315 + w2 * (2.0 / 2835))));
  }
  return 0.5 * std::sinh(2 * w) - w;
}

// Edge energy 1/2 omega [B1 a^2 + 2 S a D + C D^2 + Dw^2] with C = cosh^2 W,
// S = C - cosh^2 Wm and B1 the part of C - cosh^2 Wm beyond first order in w.
// (ch2, sh2) are cosh, sinh of 2 Wm.
inline void eval_edge(double omega, double inv_h, double a, double ch2, double sh2, double u0, double u1, double w0,
                      double w1, bool derivs, EdgeEval& r) {
  const double D = (u1 - u0) * inv_h, Dw = (w1 - w0) * inv_h, we = 0.5 * (w0 + w1);
  const double t = std::expm1(we);
  const double shw = t * (t + 2) / (2 * (t + 1)), chw = 1 + t * t / (2 * (t + 1));
  const double sh2w = 2 * shw * chw, s2 = shw * shw;
  const double cosh2W = ch2 * (1 + 2 * s2) + sh2 * sh2w;
  const double C = 0.5 * (1 + cosh2W);
  const double S = ch2 * s2 + 0.5 * sh2 * sh2w;
  const double B1 = ch2 * s2 + sh2 * odd_rest(we);
  r.e = 0.5 * omega * (B1 * a * a + 2 * S * a * D + C * D * D + Dw * Dw);
  if (!derivs) return;
  const double sinh2W = sh2 * (1 + 2 * s2) + ch2 * sh2w;
  const double X = a + D;
  r.eD = omega * (S * a + C * D);
  r.ewe = 0.5 * omega * (sinh2W * X * X - sh2 * a * a);
  r.eDw = omega * Dw;
  r.hDD = omega * C;
  r.hDwe = omega * sinh2W * X;
  r.hwewe = omega * cosh2W * X * X;
}

struct Disc {
  int nr = 0, nz = 0;
  bool axis = false;
  std::vector<Edge> edges;                  // rho edges first, then z edges
  std::vector<std::array<int, 4>> incident;  // per node, -1 when absent
  std::vector<double> volume;
  std::vector<std::uint8_t> free_u, free_w;
  std::vector<double> rho_eval;  // column evaluation radius for z edges
  int n_rho_edges = 0;

  int node(int i, int j) const { return i + j * nr; }
};

std::vector<double> dual_lengths(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = k == 0 ? x[0] : 0.5 * (x[k - 1] + x[k]);
    const double hi = k + 1 == n ? x[n - 1] : 0.5 * (x[k] + x[k + 1]);
    t[k] = hi - lo;
  }
  return t;
}

std::vector<double> dual_areas(const std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> A(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = k == 0 ? r[0] : 0.5 * (r[k - 1] + r[k]);
    const double hi = k + 1 == n ? r[n - 1] : 0.5 * (r[k] + r[k + 1]);
    A[k] = 0.5 * (hi * hi - lo * lo);
  }
  return A;
}

void set_model(Edge& e, const ModelMap& m, int dir) {
  const ModelJet j = m.jet(e.rho, e.z);
  e.a = j.dV(dir);
  e.b = j.dW(dir);
  e.Wm = j.W;
  e.ch2 = std::cosh(2 * j.W);
  e.sh2 = std::sinh(2 * j.W);
}

Disc discretize(const HyperbolicField& f) {
  const auto& g = f.grid;
  Disc d;
  d.nr = int(g.rho.size());
  d.nz = int(g.z.size());
  d.axis = g.rho[0] <= 0;
  const std::vector<double> tau = dual_lengths(g.z);
  const std::vector<double> A = dual_areas(g.rho);
  d.rho_eval.resize(d.nr);
  for (int i = 0; i < d.nr; ++i) d.rho_eval[i] = g.rho[i];
  if (d.axis) d.rho_eval[0] = 0.25 * g.rho[1];

  d.n_rho_edges = (d.nr - 1) * d.nz;
  d.edges.resize(d.n_rho_edges + d.nr * (d.nz - 1));
  parallel_for(d.nz, [&](std::size_t jj) {
    const int j = int(jj);
    for (int i = 0; i + 1 < d.nr; ++i) {
      Edge& e = d.edges[i + j * (d.nr - 1)];
      const double h = g.rho[i + 1] - g.rho[i];
      e.n0 = d.node(i, j), e.n1 = d.node(i + 1, j);
      e.rho = 0.5 * (g.rho[i] + g.rho[i + 1]);
      e.z = g.z[j];
      e.inv_h = 1 / h;
      e.omega = kTwoPi * e.rho * h * tau[j];
      set_model(e, f.model, 0);
    }
    if (j + 1 < d.nz)
      for (int i = 0; i < d.nr; ++i) {
        Edge& e = d.edges[d.n_rho_edges + i + j * d.nr];
        const double k = g.z[j + 1] - g.z[j];
        e.n0 = d.node(i, j), e.n1 = d.node(i, j + 1);
        e.rho = d.rho_eval[i];
        e.z = 0.5 * (g.z[j] + g.z[j + 1]);
        e.inv_h = 1 / k;
        e.omega = kTwoPi * A[i] * k;
        set_model(e, f.model, 1);
      }
  });

  const int nn = d.nr * d.nz;
  d.incident.assign(nn, {-1, -1, -1, -1});
  d.volume.resize(nn);
  d.free_u.assign(nn, 1);
  d.free_w.assign(nn, 1);
  for (int j = 0; j < d.nz; ++j)
    for (int i = 0; i < d.nr; ++i) {
      const int n = d.node(i, j);
      auto& inc = d.incident[n];
      if (i > 0) inc[0] = (i - 1) + j * (d.nr - 1);
      if (i + 1 < d.nr) inc[1] = i + j * (d.nr - 1);
      if (j > 0) inc[2] = d.n_rho_edges + i + (j - 1) * d.nr;
      if (j + 1 < d.nz) inc[3] = d.n_rho_edges + i + j * d.nr;
      d.volume[n] = kTwoPi * A[i] * tau[j];
      const bool outer = i == d.nr - 1 || j == 0 || j == d.nz - 1 || (!d.axis && i == 0);
      if (outer) d.free_u[n] = d.free_w[n] = 0;
    }
  if (d.axis) {
    const auto& tp = f.model.rods.turning_points;
    double scale = 1.0;
    for (double t : tp) scale = std::max(scale, std::fabs(t));
    for (int j = 1; j + 1 < d.nz; ++j) {
      const double z = g.z[j];
      const int n = d.node(0, j);
      bool corner = false;
      std::size_t rod = 0;
      for (double t : tp) {
        if (std::fabs(z - t) <= 1e-12 * scale) corner = true;
        if (t < z) ++rod;
      }
      if (corner) {
        d.free_u[n] = d.free_w[n] = 0;
        continue;
      }
      const RodCase c = rod_case(f.model.rods.rods[rod], f.model.beta_ell);
      if (c == RodCase::I || c == RodCase::II0)
        d.free_w[n] = 0;
      else
        d.free_u[n] = 0;
    }
  }
  return d;
}

inline void eval(const Edge& e, const double* u, const double* w, bool derivs, EdgeEval& r) {
  eval_edge(e.omega, e.inv_h, e.a, e.ch2, e.sh2, u[e.n0], u[e.n1], w[e.n0], w[e.n1], derivs, r);
}

struct Sums {
  double energy = 0, residual = 0;
};

// Total functional and sup residual, accumulated row by row in fixed order.
Sums sums(const Disc& d, const double* u, const double* w, bool want_residual) {
  const std::size_t ne = d.edges.size();
  std::vector<double> eD, ewe, eDw;
  if (want_residual) {
    eD.resize(ne);
    ewe.resize(ne);
    eDw.resize(ne);
  }
  std::vector<double> row(d.nz);
  parallel_for(d.nz, [&](std::size_t j) {
    KahanSum s;
    EdgeEval r;
    auto take = [&](int idx) {
      eval(d.edges[idx], u, w, want_residual, r);
      s.add(r.e);
      if (want_residual) eD[idx] = r.eD, ewe[idx] = r.ewe, eDw[idx] = r.eDw;
    };
    for (int i = 0; i + 1 < d.nr; ++i) take(i + int(j) * (d.nr - 1));
    if (int(j) + 1 < d.nz)
      for (int i = 0; i < d.nr; ++i) take(d.n_rho_edges + i + int(j) * d.nr);
    row[j] = s.value();
  });
  KahanSum tot;
  for (double v : row) tot.add(v);
  Sums out;
  out.energy = tot.value();
  if (!want_residual) return out;
  std::vector<double> rmax(d.nz, 0.0);
  parallel_for(d.nz, [&](std::size_t j) {
    double m = 0;
    for (int i = 0; i < d.nr; ++i) {
      const int n = d.node(i, int(j));
      if (!d.free_u[n] && !d.free_w[n]) continue;
      double gu = 0, gw = 0;
      for (int slot = 0; slot < 4; ++slot) {
        const int idx = d.incident[n][slot];
        if (idx < 0) continue;
        const Edge& e = d.edges[idx];
        const double sg = e.n1 == n ? 1.0 : -1.0;
        gu += eD[idx] * sg * e.inv_h;
        gw += 0.5 * ewe[idx] + eDw[idx] * sg * e.inv_h;
      }
      if (d.free_u[n]) m = std::max(m, std::fabs(gu) / d.volume[n]);
      if (d.free_w[n]) m = std::max(m, std::fabs(gw) / d.volume[n]);
    }
    rmax[j] = m;
  });
  for (double v : rmax) out.residual = std::max(out.residual, v);
  return out;
}

double local_energy(const Disc& d, int n, const double* u, const double* w) {
  double s = 0;
  EdgeEval r;
  for (int idx : d.incident[n])
    if (idx >= 0) {
      eval(d.edges[idx], u, w, false, r);
      s += r.e;
    }
  return s;
}

void update_node(const Disc& d, int n, double* u, double* w, double omega, int newton) {
  const bool fu = d.free_u[n], fw = d.free_w[n];
  if (!fu && !fw) return;
  const double u0 = u[n], w0 = w[n];
  double E0 = 0;
  double first = 0;
  for (int it = 0; it < newton; ++it) {
    double gu = 0, gw = 0, Huu = 0, Huw = 0, Hww = 0, E = 0;
    EdgeEval r;
    for (int idx : d.incident[n]) {
      if (idx < 0) continue;
      const Edge& e = d.edges[idx];
      eval(e, u, w, true, r);
      E += r.e;
      const double sg = (e.n1 == n ? 1.0 : -1.0) * e.inv_h;
      gu += r.eD * sg;
      gw += 0.5 * r.ewe + r.eDw * sg;
      Huu += r.hDD * sg * sg;
      Huw += 0.5 * r.hDwe * sg;
      Hww += 0.25 * r.hwewe + e.omega * sg * sg;
    }
    if (it == 0) E0 = E;
    double du = 0, dw = 0;
    if (fu && fw) {
      const double det = Huu * Hww - Huw * Huw;
      if (det > 1e-12 * Huu * Hww) {
        du = -(Hww * gu - Huw * gw) / det;
        dw = -(Huu * gw - Huw * gu) / det;
      } else {
        du = -gu / Huu;
        dw = -gw / Hww;
      }
    } else if (fu) {
      du = -gu / Huu;
    } else {
      dw = -gw / Hww;
    }
    if (!std::isfinite(du) || !std::isfinite(dw)) break;
    u[n] += du;
    w[n] += dw;
    const double step = std::fabs(du) + std::fabs(dw);
    if (it == 0) first = step;
    if (step <= 1e-8 * first || step == 0) break;
  }
  const double un = u[n], wn = w[n];
  // over-relaxed point first, then the Newton point, then shorter steps
  double t = omega;
  for (int k = 0; k < 40; ++k) {
    u[n] = u0 + t * (un - u0);
    w[n] = w0 + t * (wn - w0);
    if (local_energy(d, n, u, w) <= E0) return;
    t = k == 0 ? std::min(1.0, omega) : 0.5 * t;
  }
  u[n] = u0;
  w[n] = w0;
}

void enforce(const Disc& d, Eigen::MatrixXd& u, Eigen::MatrixXd& w) {
  double* pu = u.data();
  double* pw = w.data();
  for (std::size_t n = 0; n < d.free_u.size(); ++n) {
    if (!d.free_u[n]) pu[n] = 0;
    if (!d.free_w[n]) pw[n] = 0;
  }
}

}  // namespace

double variational_residual(const HyperbolicField& f) {
  const Disc d = discretize(f);
  return sums(d, f.u.data(), f.w.data(), true).residual;
}

double discrete_reduced_energy(const HyperbolicField& f) {
  const Disc d = discretize(f);
  return sums(d, f.u.data(), f.w.data(), false).energy;
}

RelaxResult relax(const HyperbolicField& start, const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RelaxResult out{start, {}};
  HyperbolicField& f = out.field;
  RelaxReport& rep = out.report;
  const Disc d = discretize(f);
  enforce(d, f.u, f.w);
  double* u = f.u.data();
  double* w = f.w.data();
  Sums s = sums(d, u, w, true);
  rep.energy_history.push_back(s.energy);
  rep.residual_history.push_back(s.residual);
  rep.final_residual = s.residual;
  rep.converged = s.residual <= cfg.tolerance;
  for (int sweep = 1; sweep <= cfg.max_sweeps && !rep.converged; ++sweep) {
    for (int color = 0; color < 2; ++color)
      parallel_for(d.nz, [&](std::size_t jj) {
        const int j = int(jj);
        for (int i = (j + color) % 2; i < d.nr; i += 2) update_node(d, d.node(i, j), u, w, cfg.omega, cfg.newton_iterations);
      });
    rep.sweeps = sweep;
    const bool res = sweep % cfg.residual_every == 0 || sweep == cfg.max_sweeps;
    s = sums(d, u, w, res);
    rep.energy_history.push_back(s.energy);
    if (res) {
      rep.residual_history.push_back(s.residual);
      rep.final_residual = s.residual;
      rep.converged = s.residual <= cfg.tolerance;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace {

// centered three-point weights on a non-uniform stencil
struct Stencil {
  double d1[3], d2[3];
};

Stencil stencil(double xm, double x0, double xp) {
  const double hm = x0 - xm, hp = xp - x0, s = hm + hp;
  Stencil st;
  st.d1[0] = -hp / (hm * s), st.d1[1] = (hp - hm) / (hm * hp), st.d1[2] = hm / (hp * s);
  st.d2[0] = 2 / (hm * s), st.d2[1] = -2 / (hm * hp), st.d2[2] = 2 / (hp * s);
  return st;
}

}  // namespace

ResidualGrids residual(const HyperbolicField& f) {
  const auto& g = f.grid;
  const int nr = int(g.rho.size()), nz = int(g.z.size());
  ResidualGrids R;
  R.RV = Eigen::MatrixXd::Zero(nr, nz);
  R.RW = R.RV;
  parallel_for(nz, [&](std::size_t jj) {
    const int j = int(jj);
    if (j == 0 || j == nz - 1) return;
    const Stencil sz = stencil(g.z[j - 1], g.z[j], g.z[j + 1]);
    for (int i = 1; i + 1 < nr; ++i) {
      if (g.rho[i] <= 0) continue;
      const Stencil sr = stencil(g.rho[i - 1], g.rho[i], g.rho[i + 1]);
      auto d = [&](const Eigen::MatrixXd& m, Eigen::Vector2d& grad, double& lap) {
        grad(0) = sr.d1[0] * m(i - 1, j) + sr.d1[1] * m(i, j) + sr.d1[2] * m(i + 1, j);
        grad(1) = sz.d1[0] * m(i, j - 1) + sz.d1[1] * m(i, j) + sz.d1[2] * m(i, j + 1);
        lap = sr.d2[0] * m(i - 1, j) + sr.d2[1] * m(i, j) + sr.d2[2] * m(i + 1, j) + grad(0) / g.rho[i] +
              sz.d2[0] * m(i, j - 1) + sz.d2[1] * m(i, j) + sz.d2[2] * m(i, j + 1);
      };
      Eigen::Vector2d gu, gw;
      double lu, lw;
      d(f.u, gu, lu);
      d(f.w, gw, lw);
      const ModelJet m = f.model.jet(g.rho[i], g.z[j]);
      const Eigen::Vector2d gV = m.dV + gu, gW = m.dW + gw;
      const double W = m.W + f.w(i, j);
      const double c = std::cosh(W), sn = std::sinh(W);
      R.RV(i, j) = c * c * (m.lapV + lu) + 2 * sn * c * gW.dot(gV);
      R.RW(i, j) = m.lapW + lw - sn * c * gV.squaredNorm();
    }
  });
  return R;
}

double ResidualGrids::sup(const HyperbolicField& f, double rho_min, double corner_margin) const {
  double m = 0;
  for (int j = 0; j < RV.cols(); ++j)
    for (int i = 0; i < RV.rows(); ++i) {
      if (f.grid.rho[i] < rho_min) continue;
      bool near = false;
      for (double t : f.model.rods.turning_points)
        if (std::hypot(f.grid.rho[i], f.grid.z[j] - t) < corner_margin) near = true;
      if (near) continue;
      m = std::max({m, std::fabs(RV(i, j)), std::fabs(RW(i, j))});
    }
  return m;
}

double energy(const HyperbolicField& f, const Box& box) {
  if (!(box.rho_min > 0)) throw std::domain_error("energy: domain touches the axis (rho_min must be > 0)");
  if (!(box.rho_max > box.rho_min && box.z_max > box.z_min)) throw std::invalid_argument("energy: empty box");
  const Disc d = discretize(f);
  const auto& g = f.grid;
  const double eps = 1e-12 * std::max(1.0, box.rho_max);
  const auto clip = [](double lo, double hi, double a, double b) {
    return std::make_pair(std::max(lo, a), std::min(hi, b));
  };
  const auto zdual = [&](int j) {
    const double lo = j == 0 ? g.z[0] : 0.5 * (g.z[j - 1] + g.z[j]);
    const double hi = j + 1 == d.nz ? g.z[j] : 0.5 * (g.z[j] + g.z[j + 1]);
    const auto [a, b] = clip(lo, hi, box.z_min, box.z_max);
    return std::max(0.0, b - a);
  };
  const auto rdual = [&](int i) {
    const double lo = i == 0 ? g.rho[0] : 0.5 * (g.rho[i - 1] + g.rho[i]);
    const double hi = i + 1 == d.nr ? g.rho[i] : 0.5 * (g.rho[i] + g.rho[i + 1]);
    const auto [a, b] = clip(lo, hi, box.rho_min, box.rho_max);
    return b > a ? 0.5 * (b * b - a * a) : 0.0;
  };
  const double* u = f.u.data();
  const double* w = f.w.data();
  KahanSum s;
  for (std::size_t idx = 0; idx < d.edges.size(); ++idx) {
    const Edge& e = d.edges[idx];
    double weight = 0;
    if (int(idx) < d.n_rho_edges) {
      const int i = e.n0 % d.nr, j = e.n0 / d.nr;
      if (g.rho[i] < box.rho_min - eps || g.rho[i + 1] > box.rho_max + eps) continue;
      weight = kTwoPi * e.rho * (g.rho[i + 1] - g.rho[i]) * zdual(j);
    } else {
      const int i = e.n0 % d.nr, j = e.n0 / d.nr;
      if (g.z[j] < box.z_min - eps || g.z[j + 1] > box.z_max + eps) continue;
      weight = kTwoPi * rdual(i) * (g.z[j + 1] - g.z[j]);
    }
    if (weight == 0) continue;
    const double D = e.a + (u[e.n1] - u[e.n0]) * e.inv_h;
    const double Dw = e.b + (w[e.n1] - w[e.n0]) * e.inv_h;
    const double c = std::cosh(e.Wm + 0.5 * (w[e.n0] + w[e.n1]));
    s.add(0.5 * weight * (c * c * D * D + Dw * Dw));
  }
  return s.value();
}

std::vector<Margins> default_schedule() {
  return {{1e-1, 1e-1, 2.0 / 50}, {1e-2, 3e-2, 2.0 / 100}, {1e-3, 1e-2, 2.0 / 200}};
}

namespace {

bool same_layout(const HyperbolicField& a, const HyperbolicField& b) {
  return a.grid.rho == b.grid.rho && a.grid.z == b.grid.z && a.model.description == b.model.description &&
         a.model.beta_ell == b.model.beta_ell;
}

// Edge sum of the reduced energy of psi about psi_o, restricted by keep.
template <class Keep>
double reduced_sum(const HyperbolicField& psi, const HyperbolicField& o, const Disc& d, Keep keep) {
  const double *u = psi.u.data(), *w = psi.w.data(), *uo = o.u.data(), *wo = o.w.data();
  std::vector<double> row(d.nz, 0.0);
  parallel_for(d.nz, [&](std::size_t jj) {
    KahanSum s;
    EdgeEval r;
    auto take = [&](int idx) {
      const Edge& e = d.edges[idx];
      if (!keep(e)) return;
      const double Wo = e.Wm + 0.5 * (wo[e.n0] + wo[e.n1]);
      const double a = e.a + (uo[e.n1] - uo[e.n0]) * e.inv_h;
      eval_edge(e.omega, e.inv_h, a, std::cosh(2 * Wo), std::sinh(2 * Wo), u[e.n0] - uo[e.n0], u[e.n1] - uo[e.n1],
                w[e.n0] - wo[e.n0], w[e.n1] - wo[e.n1], false, r);
      s.add(r.e);
    };
    const int j = int(jj);
    for (int i = 0; i + 1 < d.nr; ++i) take(i + j * (d.nr - 1));
    if (j + 1 < d.nz)
      for (int i = 0; i < d.nr; ++i) take(d.n_rho_edges + i + j * d.nr);
    row[jj] = s.value();
  });
  KahanSum t;
  for (double v : row) t.add(v);
  return t.value();
}

void check_pair(const HyperbolicField& psi, const HyperbolicField& o, const Disc& d) {
  if (!same_layout(psi, o)) throw std::invalid_argument("reduced energy: fields differ in grid or model");
  const double r = sums(d, o.u.data(), o.w.data(), true).residual;
  if (!(r <= 1e-10))
    throw std::invalid_argument("reduced energy: reference field is not harmonic (residual " + num(r) + ")");
}

}  // namespace

double reduced_energy(const HyperbolicField& psi, const HyperbolicField& psi_o, const Margins& m) {
  const Disc d = discretize(psi_o);
  check_pair(psi, psi_o, d);
  const auto& tp = psi_o.model.rods.turning_points;
  const double rout = 2 / m.sigma3;
  return reduced_sum(psi, psi_o, d, [&](const Edge& e) {
    if (e.rho <= m.sigma1 || std::hypot(e.rho, e.z) >= rout) return false;
    for (double t : tp)
      if (std::hypot(e.rho, e.z - t) <= m.sigma2) return false;
    return true;
  });
}

ReducedEnergyReport reduced_energy(const HyperbolicField& psi, const HyperbolicField& psi_o,
                                   const std::vector<Margins>& schedule) {
  ReducedEnergyReport rep;
  rep.schedule = schedule;
  for (const Margins& m : schedule) rep.values.push_back(reduced_energy(psi, psi_o, m));
  rep.limit = rep.values.empty() ? 0.0 : rep.values.back();
  if (rep.values.size() >= 3) {
    double lo = rep.values.front(), hi = lo;
    for (double v : rep.values) lo = std::min(lo, v), hi = std::max(hi, v);
    if (hi - lo > 1e-12 * std::max(1.0, std::fabs(hi))) {
      std::vector<double> r;
      for (const Margins& m : schedule) r.push_back(1 / m.sigma1);
      try {
        const DecayFit fit = fit_decay(r, rep.values);
        if (std::isfinite(fit.limit)) rep.limit = fit.limit;
      } catch (const std::exception&) {
      }
    }
  }
  return rep;
}

ConvexityGap convexity_gap_check(const HyperbolicField& psi, const HyperbolicField& psi_o) {
  const Disc d = discretize(psi_o);
  check_pair(psi, psi_o, d);
  ConvexityGap out;
  out.lhs = reduced_sum(psi, psi_o, d, [](const Edge&) { return true; });

  const auto& g = psi.grid;
  const int nr = d.nr, nz = d.nz;
  // distance at a point of cell (i, j) with local coordinates (s, t) in [0,1]^2
  const auto dist = [&](int i, int j, double s, double t, double Wm) {
    const auto lerp = [&](const Eigen::MatrixXd& m) {
      return (1 - s) * (1 - t) * m(i, j) + s * (1 - t) * m(i + 1, j) + (1 - s) * t * m(i, j + 1) +
             s * t * m(i + 1, j + 1);
    };
    const HyperbolicPoint p{lerp(psi.u), Wm + lerp(psi.w)};
    const HyperbolicPoint q{lerp(psi_o.u), Wm + lerp(psi_o.w)};
    return h2_distance(p, q);
  };
  Eigen::MatrixXd centre(nr - 1, nz - 1);
  parallel_for(nz - 1, [&](std::size_t jj) {
    const int j = int(jj);
    for (int i = 0; i + 1 < nr; ++i) {
      const double rc = 0.5 * (g.rho[i] + g.rho[i + 1]), zc = 0.5 * (g.z[j] + g.z[j + 1]);
      centre(i, j) = dist(i, j, 0.5, 0.5, psi_o.model.jet(rc, zc).W);
    }
  });
  const double dmax = centre.size() ? centre.maxCoeff() : 0.0;
  std::vector<double> row(nz - 1, 0.0);
  parallel_for(nz - 1, [&](std::size_t jj) {
    const int j = int(jj);
    KahanSum s;
    for (int i = 0; i + 1 < nr; ++i) {
      const double dr = g.rho[i + 1] - g.rho[i], dz = g.z[j + 1] - g.z[j];
      if (dmax > 0 && centre(i, j) > 0.5 * dmax) {
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            const double sa = (a + 0.5) / 4, tb = (b + 0.5) / 4;
            const double r = g.rho[i] + sa * dr, z = g.z[j] + tb * dz;
            const double v = dist(i, j, sa, tb, psi_o.model.jet(r, z).W);
            s.add(std::pow(v, 6) * r * dr * dz / 16);
          }
      } else {
        const double r = 0.5 * (g.rho[i] + g.rho[i + 1]);
        s.add(std::pow(centre(i, j), 6) * r * dr * dz);
      }
    }
    row[jj] = s.value();
  });
  KahanSum t;
  for (double v : row) t.add(v);
  out.rhs_raw = std::cbrt(kTwoPi * t.value());
  return out;
}

namespace {

struct Jet9 {
  Potentials p;
  Eigen::Vector2d dalpha, dZ, dV, dW;
  double lapV = 0, lapW = 0;
  Eigen::Vector2d F = Eigen::Vector2d::Zero();  // F^i_{rho z}
  Eigen::Matrix2d G = Eigen::Matrix2d::Identity();
  double alpha = 0;
};

Jet9 jet9(const BrillSampler& s, double beta_ell, double rho, double z, double h) {
  Potentials P[2][5];
  Eigen::Matrix2d A[2][5];
  Jet9 j;
  for (int k = 0; k < 5; ++k) {
    const double off = (k - 2) * h;
    BrillSample b = s(rho + off, z);
    P[0][k] = potentials(b, beta_ell);
    A[0][k] = b.A;
    if (k == 2) {
      P[1][k] = P[0][k];
      A[1][k] = b.A;
      j.G = b.G;
      continue;
    }
    b = s(rho, z + off);
    P[1][k] = potentials(b, beta_ell);
    A[1][k] = b.A;
  }
  const auto der = [&](int dir, double Potentials::*f) {
    double v[5];
    for (int k = 0; k < 5; ++k) v[k] = P[dir][k].*f;
    return ddiff(v, h);
  };
  const auto sec = [&](int dir, double Potentials::*f) {
    double v[5];
    for (int k = 0; k < 5; ++k) v[k] = P[dir][k].*f;
    return d2diff(v, h);
  };
  j.p = P[0][2];
  j.alpha = j.p.alpha;
  j.dalpha = {der(0, &Potentials::alpha), der(1, &Potentials::alpha)};
  j.dZ = {der(0, &Potentials::Z), der(1, &Potentials::Z)};
  j.dV = {der(0, &Potentials::V), der(1, &Potentials::V)};
  j.dW = {der(0, &Potentials::W), der(1, &Potentials::W)};
  j.lapV = sec(0, &Potentials::V) + j.dV(0) / rho + sec(1, &Potentials::V);
  j.lapW = sec(0, &Potentials::W) + j.dW(0) / rho + sec(1, &Potentials::W);
  for (int i = 0; i < 2; ++i) {
    double az[5], ar[5];
    for (int k = 0; k < 5; ++k) az[k] = A[0][k](i, 1), ar[k] = A[1][k](i, 0);
    j.F(i) = ddiff(az, h) - ddiff(ar, h);
  }
  return j;
}

struct BulkTerms {
  double reduced = 0, curvature = 0, dZ = 0, twist = 0;
};

// The fields carry log rho terms, so near the axis the step must shrink
// with rho.
double axis_step(double rho) { return std::min(default_step(rho), 1e-2 * rho); }

BulkTerms bulk_density(const BrillSampler& g, const BrillSampler& o, double bl, double rho, double z) {
  const double h = axis_step(rho);
  const Jet9 a = jet9(g, bl, rho, z, h), b = jet9(o, bl, rho, z, h);
  const double dV = a.p.V - b.p.V, dW = a.p.W - b.p.W;
  const double sa = std::sinh(a.p.W), sb = std::sinh(b.p.W);
  BulkTerms t;
  t.reduced = 0.5 * (sa * sa * a.dV.squaredNorm() - sb * sb * b.dV.squaredNorm() + (a.dV - b.dV).squaredNorm() +
                     (a.dW - b.dW).squaredNorm()) -
              (dV * b.lapV + dW * b.lapW);
  t.curvature = scalar_curvature_extrapolated(g, rho, z) * std::exp(2 * a.alpha);
  t.dZ = 1.5 * a.dZ.squaredNorm();
  t.twist = 0.5 * std::exp(-2 * a.alpha) * a.F.dot(a.G * a.F);
  return t;
}

// Gauss panels on [lo, hi] with breakpoints graded geometrically toward the
// listed points.
QuadRule graded_rule(double lo, double hi, const std::vector<double>& focus, double min_gap, std::size_t n) {
  std::vector<double> br{lo, hi};
  for (double f : focus)
    for (double d = min_gap; d < hi - lo; d *= 2) {
      br.push_back(f - d);
      br.push_back(f + d);
    }
  br.erase(std::remove_if(br.begin(), br.end(), [&](double x) { return x < lo || x > hi; }), br.end());
  std::sort(br.begin(), br.end());
  std::vector<double> keep{br.front()};
  for (double x : br)
    if (x - keep.back() > 1e-12 * std::max(1.0, std::fabs(x))) keep.push_back(x);
  if (keep.back() < hi) keep.back() = hi;
  return composite_gauss(keep, n);
}

// Allowed z intervals at radius rho: inside the outer ball, outside the corner balls.
std::vector<std::pair<double, double>> z_intervals(double rho, double rout, double s2, const std::vector<double>& tp) {
  const double zt = std::sqrt(std::max(0.0, rout * rout - rho * rho));
  std::vector<std::pair<double, double>> holes;
  for (double t : tp)
    if (rho < s2) {
      const double c = std::sqrt(s2 * s2 - rho * rho);
      holes.push_back({t - c, t + c});
    }
  std::sort(holes.begin(), holes.end());
  std::vector<std::pair<double, double>> out;
  double a = -zt;
  for (const auto& [l, r] : holes) {
    if (l > a) out.push_back({a, std::min(l, zt)});
    a = std::max(a, r);
  }
  if (a < zt) out.push_back({a, zt});
  return out;
}

}  // namespace

DivergenceReport divergence_identity_check(const BrillSampler& g, const BrillSampler& g_o, double beta_ell,
                                           const std::vector<double>& tp, const Margins& m, int level) {
  if (level < 1) throw std::invalid_argument("divergence check: level must be >= 1");
  const double s1 = m.sigma1, s2 = m.sigma2, rout = 2 / m.sigma3;
  if (!(s1 > 0 && s2 >= s1 && rout > 0)) throw std::invalid_argument("divergence check: need 0 < s1 <= s2");
  for (std::size_t n = 1; n < tp.size(); ++n)
    if (tp[n] - tp[n - 1] <= 2 * s2) throw std::invalid_argument("divergence check: corner balls overlap");
  for (double t : tp)
    if (std::fabs(t) + s2 >= rout) throw std::invalid_argument("divergence check: corner outside the outer ball");
  const std::size_t npan = 2 * level;
  const double grade = s1;

  DivergenceReport rep;
  // bulk
  std::vector<double> rfocus{s1};
  if (s2 > s1) rfocus.push_back(s2);
  const QuadRule qr = graded_rule(s1, rout, rfocus, grade, npan);
  std::vector<BulkTerms> acc(qr.x.size());
  parallel_for(qr.x.size(), [&](std::size_t k) {
    const double rho = qr.x[k];
    BulkTerms sum;
    for (const auto& [a, b] : z_intervals(rho, rout, s2, tp)) {
      std::vector<double> foc(tp);
      foc.push_back(a);
      foc.push_back(b);
      const QuadRule qz = graded_rule(a, b, foc, std::max(0.5 * rho, grade), npan);
      for (std::size_t l = 0; l < qz.x.size(); ++l) {
        const BulkTerms t = bulk_density(g, g_o, beta_ell, rho, qz.x[l]);
        const double wgt = qz.w[l] * kTwoPi * rho;
        sum.reduced += wgt * t.reduced;
        sum.curvature += wgt * t.curvature;
        sum.dZ += wgt * t.dZ;
        sum.twist += wgt * t.twist;
      }
    }
    acc[k] = sum;
  });
  KahanSum red, cur, dz, tw;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    red.add(qr.w[k] * acc[k].reduced);
    cur.add(qr.w[k] * acc[k].curvature);
    dz.add(qr.w[k] * acc[k].dZ);
    tw.add(qr.w[k] * acc[k].twist);
  }
  rep.reduced = red.value();
  rep.curvature = cur.value();
  rep.dZ = dz.value();
  rep.twist = tw.value();
  rep.bulk = rep.reduced + rep.curvature + rep.dZ + rep.twist;

  const auto X = [&](double rho, double z, const Eigen::Vector2d& nu) {
    return x_directional(g, g_o, beta_ell, rho, z, nu, axis_step(rho));
  };
  // cylinder rho = s1, normal -rho
  {
    KahanSum s;
    for (const auto& [a, b] : z_intervals(s1, rout, s2, tp)) {
      std::vector<double> foc(tp);
      foc.push_back(a);
      foc.push_back(b);
      const QuadRule qz = graded_rule(a, b, foc, grade, npan);
      std::vector<double> v(qz.x.size());
      parallel_for(qz.x.size(), [&](std::size_t l) { v[l] = X(s1, qz.x[l], Eigen::Vector2d(-1, 0)); });
      for (std::size_t l = 0; l < v.size(); ++l) s.add(qz.w[l] * kTwoPi * s1 * v[l]);
    }
    rep.axis = s.value();
  }
  // an arc of radius R about (0, zc) between polar angles [t0, pi - t0]
  const auto arc = [&](double zc, double R, double sign) {
    const double t0 = std::asin(std::min(1.0, s1 / R));
    const QuadRule q = graded_rule(t0, kPi - t0, {t0, kPi - t0}, std::max(1e-3 * (kPi - 2 * t0), s1 / R), npan);
    std::vector<double> v(q.x.size());
    parallel_for(q.x.size(), [&](std::size_t l) {
      const double th = q.x[l];
      const double rho = R * std::sin(th), z = zc + R * std::cos(th);
      v[l] = X(rho, z, Eigen::Vector2d(sign * std::sin(th), sign * std::cos(th))) * kTwoPi * rho * R;
    });
    KahanSum s;
    for (std::size_t l = 0; l < v.size(); ++l) s.add(q.w[l] * v[l]);
    return s.value();
  };
  for (double t : tp) rep.corner += arc(t, s2, -1.0);
  rep.infinity = arc(0.0, rout, 1.0);
  rep.boundary = rep.axis + rep.corner + rep.infinity;
  rep.imbalance = std::fabs(rep.boundary - rep.bulk);
  rep.relative = rep.imbalance / std::max({std::fabs(rep.bulk), std::fabs(rep.boundary), 1e-300});
  return rep;
}

}  // namespace iml
