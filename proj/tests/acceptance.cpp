// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "curvature_oracle.hpp"
#include "iml/comparison.hpp"
#include "iml/solver.hpp"

using namespace iml;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::require(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  if (!detail.empty()) detail += "; ";
  detail += buf;
  if (!ok) {
    pass = false;
    detail += " [x]";
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

Outcome flux_masses() {
  Outcome o;
  struct Case {
    const char* name;
    Family f;
    double want;
  };
  const Case cases[] = {{"schwarzschild(1)", make_schwarzschild(1), 16 * kPi},
                        {"kerr(2,1)", make_kerr(2, 1), 36 * kPi / 5},
                        {"taub-nut(2)", make_taub_nut(2), 4 * kPi},
                        {"taub-bolt(2)", make_taub_bolt(2), 5 * kPi},
                        {"charged-taub-bolt(1,2)", make_charged_taub_bolt(1, 2), 5 * kPi},
                        {"rn(1,-3)", make_rn(1, -3), -2 * kPi}};
  for (const Case& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const double m = estimate_mass(c.f, default_model(c.f)).extrapolated;
    const double t = seconds_since(t0), e = rel(m, c.want);
    o.require(e <= 1e-3 && t < 10, "%s rel %.2e %.2fs", c.name, e, t);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Family eh = make_eguchi_hanson(1);
  const double m = estimate_mass(eh, default_model(eh)).extrapolated;
  const double t = seconds_since(t0);
  o.require(std::fabs(m) <= 1e-3 && t < 10, "eguchi-hanson |m| %.2e %.2fs", std::fabs(m), t);
  return o;
}

Outcome chen_teo() {
  Outcome o;
  double min_mass = INFINITY, worst = 0;
  int n = 0;
  for (double kappa : {0.5, 1.0, 2.0})
    for (int i = 0; i <= 40; ++i) {
      const double xi = 0.51 + (0.70 - 0.51) * i / 40;
      const ChenTeoForms c = chen_teo_forms(kappa, xi);
      min_mass = std::min(min_mass, c.mass_raw);
      worst = std::max(worst, std::fabs(c.mass_raw - c.mass_substituted) / std::fabs(c.mass_raw));
      ++n;
    }
  o.require(min_mass > 0, "%d points, min mass %.4g", n, min_mass);
  o.require(worst <= 1e-12, "forms differ by %.2e", worst);
  return o;
}

Outcome scalar_curvature_residual() {
  Outcome o;
  double worst = 0;
  std::string worst_name;
  for (const Family& f : {make_schwarzschild(1), make_kerr(2, 1), make_taub_nut(2), make_taub_bolt(2),
                          make_eguchi_hanson(1), make_euclidean(), make_flat_ale(2, 1),
                          make_flat_alf(1, 2, 0, true), make_flat_af(0.3, 2), make_charged_taub_bolt(1, 2),
                          make_rn(1, -3), make_rn_mc(1, -3, 0.5)}) {
    const BrillSampler s = family_sampler(f);
    const auto pts = bulk_sample_points(f, 100, 20261014);
    std::vector<double> R(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
      R[k] = std::fabs(scalar_curvature_extrapolated(s, pts[k].first, pts[k].second));
    });
    for (double r : R)
      if (r > worst) {
        worst = r;
        worst_name = f.name();
      }
  }
  o.require(worst <= 1e-6, "max |R| %.2e (%s)", worst, worst_name.c_str());

  const Family sch = make_schwarzschild(1);
  const BrillSampler pert = [&](double rho, double z) {
    BrillSample b = sample_brill(sch, rho, z);
    b.G(0, 0) *= 1 + 0.1 * rho * rho * std::exp(-rho * rho - z * z);
    b.has_frames = false;
    return b;
  };
  double diff = 0;
  for (double rho : {0.5, 1.0, 1.5})
    for (double z : {-0.5, 0.3}) {
      const double R = scalar_curvature(pert, rho, z, default_step(rho));
      const double Ro = oracle::scalar_curvature(pert, rho, z, 1e-3);
      diff = std::max(diff, std::fabs(R - Ro) / std::max(1.0, std::fabs(Ro)));
    }
  o.require(diff <= 1e-4, "perturbed vs 4-metric oracle %.2e", diff);
  return o;
}

Outcome reduction_round_trip() {
  Outcome o;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> U(-2, 2), P(0.05, 5);
  const Family fams[] = {make_kerr(2, 1), make_taub_bolt(2), make_eguchi_hanson(1), make_rn(1, -3)};
  double worst = 0, worst_det = 0;
  int twisted = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    Eigen::Matrix2d G;
    double rho = 0, beta_ell = 0;
    if (k % 2 == 0) {
      const Family& f = fams[(k / 2) % 4];
      const double s = std::max(1.0, f.chart_L);
      rho = s * P(gen);
      G = sample_brill(f, rho, s * U(gen)).G;
    } else {
      beta_ell = (k / 2) % 2 ? 0.5 : -1.3;
      ++twisted;
      rho = P(gen);
      G = reconstruct_torus_matrix({U(gen), U(gen)}, 0.5 * U(gen), rho, beta_ell);
    }
    const auto [r, p] = reduce_torus_matrix(G, rho, beta_ell);
    const Eigen::Matrix2d G2 = reconstruct_torus_matrix(p, r.Z, rho, beta_ell);
    worst = std::max(worst, (G2 - G).norm() / G.norm());
    worst_det = std::max(worst_det, std::fabs(r.Phi.determinant() - 1));
  }
  o.require(worst <= 1e-12, "%d samples (%d twisted), round trip %.2e", n, twisted, worst);
  o.require(worst_det <= 1e-12, "|det Phi - 1| %.2e", worst_det);
  return o;
}

Outcome defects() {
  Outcome o;
  double worst = 0;
  std::string worst_name;
  for (const Family& f : {make_schwarzschild(1), make_kerr(2, 1), make_taub_nut(2), make_taub_bolt(2),
                          make_charged_taub_bolt(1, 2), make_rn(1, -3), make_eguchi_hanson(1), make_euclidean(),
                          make_flat_ale(2, 1), make_flat_alf(1, 2), make_flat_af(0.3, 2)})
    for (const DefectProfile& p : defect_profiles(f))
      for (const auto& s : p.samples)
        if (std::fabs(s.second) > worst) {
          worst = std::fabs(s.second);
          worst_name = f.name();
        }
  o.require(worst <= 1e-8, "smooth families max |theta| %.2e (%s)", worst, worst_name.c_str());

  const Family rn = make_rn_mc(1, -3, 0.5);
  const DefectValue d = angle_defect_at(rn, 1, 0.3);
  const double want = 2 * std::log(3.0);
  o.require(std::fabs(d.limit - want) <= 1e-6, "RN limit err %.2e", std::fabs(d.limit - want));
  o.require(std::fabs(d.identity - want) <= 1e-6, "RN identity err %.2e", std::fabs(d.identity - want));
  o.require(std::fabs(d.limit - d.identity) <= 1e-6, "methods differ %.2e", std::fabs(d.limit - d.identity));
  return o;
}

Outcome p_lemma() {
  Outcome o;
  double min_P = INFINITY, worst = 0;
  int n = 0, zeros = 0, bad_zeros = 0;
  const auto visit = [&](double M, double c1) {
    const PForms p = rn_vs_schwarzschild_P(M, c1);
    ++n;
    min_P = std::min(min_P, p.reduced);
    worst = std::max(worst, std::fabs(p.reduced - p.x_form));
    if (std::fabs(p.reduced) <= 1e-12) {
      ++zeros;
      if (c1 != 0) ++bad_zeros;
    }
  };
  for (int i = 0; i < 100; ++i) {
    const double M = 0.05 + 2.95 * i / 99;
    for (int j = 0; j < 100; ++j) visit(M, std::min(M * M, -4 + (M * M + 4) * j / 99));
    visit(M, 0.0);
  }
  o.require(n >= 10000 && min_P >= -1e-12, "%d points, min P %.2e", n, min_P);
  o.require(zeros > 0 && bad_zeros == 0, "%d zeros, %d off c1 = 0", zeros, bad_zeros);
  o.require(worst <= 1e-12, "forms differ by %.2e", worst);

  const Family g = make_rn_mc(1, -3);
  const TheoremGapReport r = theorem_gap(g, schwarzschild_partner(g));
  const double want = rn_vs_schwarzschild_P(1, -3).full(g.ell), e = rel(r.slack, want);
  o.require(e <= 2e-3, "pipeline slack %.6g vs 4 pi ell P %.6g, rel %.2e", r.slack, want, e);
  return o;
}

Outcome harmonic_solver() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Family s = make_schwarzschild(1);
  const ModelMap m = build_model_map(family_rod_data(s), default_model(s));
  SolverConfig cfg;
  cfg.n_rho = 129;
  cfg.n_z = 257;
  cfg.omega = 1.97;
  HyperbolicField f = make_field(m, cfg);
  for (std::size_t j = 0; j < f.grid.z.size(); ++j)
    for (std::size_t i = 0; i < f.grid.rho.size(); ++i) {
      const double r = f.grid.rho[i], z = f.grid.z[j];
      f.u(i, j) = 0.1 * std::exp(-((r - 3) * (r - 3) + (z - 2) * (z - 2)) / 4);
    }
  const RelaxResult res = relax(f, cfg);
  const double t = seconds_since(t0);
  double inc = 0;
  const auto& h = res.report.energy_history;
  for (std::size_t k = 1; k < h.size(); ++k) inc = std::max(inc, h[k] - h[k - 1]);
  double dist = 0;
  for (std::size_t j = 0; j < f.grid.z.size(); ++j)
    for (std::size_t i = 1; i < f.grid.rho.size(); ++i) {
      const HyperbolicPoint exact = reduce_sample(sample_brill(s, f.grid.rho[i], f.grid.z[j]), 0).second;
      dist = std::max(dist, h2_distance(res.field.value(int(i), int(j)), exact));
    }
  o.require(res.report.converged && res.report.final_residual <= 1e-8 && res.report.sweeps <= 10000,
            "%d sweeps, residual %.2e", res.report.sweeps, res.report.final_residual);
  o.require(dist <= 1e-4, "sup h2 distance %.2e", dist);
  o.require(inc <= 1e-12, "max energy increase %.2e", inc);
  o.require(t <= 60, "%.1fs", t);
  return o;
}

Outcome divergence_identity() {
  Outcome o;
  const Family rn = make_rn(1, -3), sch = make_schwarzschild(0.5);
  const BrillSampler g = family_sampler(rn), go = family_sampler(sch);
  const auto tp = family_rod_data(rn).turning_points;
  const Margins fine = default_schedule().back();
  std::vector<double> imb;
  DivergenceReport last;
  for (int level : {1, 2, 3}) {
    last = divergence_identity_check(g, go, 0, tp, fine, level);
    imb.push_back(last.relative);
  }
  o.require(last.relative <= 1e-3, "boundary %.8g bulk %.8g rel %.2e", last.boundary, last.bulk, last.relative);
  o.require(imb[2] < imb[0] && imb[1] < imb[0], "levels 1-3 rel %.2e %.2e %.2e", imb[0], imb[1], imb[2]);
  return o;
}

Outcome convexity() {
  Outcome o;
  const Family s = make_schwarzschild(1), tn = make_taub_nut(2);
  SolverConfig c;
  c.n_rho = 65;
  c.n_z = 129;
  const HyperbolicField fs = make_field(build_model_map(family_rod_data(s), default_model(s)), c);
  const HyperbolicField ft = make_field(build_model_map(family_rod_data(tn), default_model(tn)), c);
  std::mt19937 rng(20261014);
  std::uniform_real_distribution<double> U(-1, 1);
  int positive = 0, failures = 0;
  double min_lhs = INFINITY;
  for (int k = 0; k < 20; ++k) {
    const HyperbolicField& base = k % 2 ? ft : fs;
    HyperbolicField g = base;
    const double A = 0.5 * U(rng), B = 0.5 * U(rng), r0 = 2 + 2 * U(rng), z0 = 3 * U(rng), w2 = 1 + U(rng) * 0.5;
    for (std::size_t j = 0; j < g.grid.z.size(); ++j)
      for (std::size_t i = 0; i < g.grid.rho.size(); ++i) {
        const double r = g.grid.rho[i], z = g.grid.z[j];
        const double b = std::exp(-((r - r0) * (r - r0) + (z - z0) * (z - z0)) / w2);
        g.u(i, j) = A * b;
        g.w(i, j) = i == 0 ? 0.0 : B * b * r * r / (1 + r * r);
      }
    const ConvexityGap cg = convexity_gap_check(g, base);
    min_lhs = std::min(min_lhs, cg.lhs);
    if (cg.lhs < 0 || (cg.rhs_raw > 0 && !(cg.lhs > 0))) ++failures;
    if (cg.rhs_raw > 0 && cg.lhs > 0) ++positive;
  }
  o.require(failures == 0, "20 perturbations, %d strictly positive, min reduced energy %.3e", positive, min_lhs);
  return o;
}

Outcome corner_fluxes() {
  Outcome o;
  struct Pair {
    const char* name;
    Family g, go;
    double z;
  };
  const Pair pairs[] = {{"rn/schwarzschild", make_rn(1, -3), make_schwarzschild(0.5), 1.0},
                        {"ctb/taub-bolt", make_charged_taub_bolt(1.2, 2), make_taub_bolt(std::sqrt(16 * 1.19 / 3)),
                         1.19}};
  for (const Pair& p : pairs) {
    std::vector<double> v;
    for (double s : {0.1, 0.05, 0.025})
      v.push_back(std::fabs(corner_flux(family_sampler(p.g), family_sampler(p.go), 0, p.z, s)));
    o.require(v[1] < v[0] && v[2] < v[1] && v[2] <= 1e-4, "%s %.2e %.2e %.2e", p.name, v[0], v[1], v[2]);
  }
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"flux masses", flux_masses},
      {"chen-teo closed form", chen_teo},
      {"scalar curvature", scalar_curvature_residual},
      {"reduction round trip", reduction_round_trip},
      {"angle defects", defects},
      {"P lemma", p_lemma},
      {"harmonic solver", harmonic_solver},
      {"divergence identity", divergence_identity},
      {"convexity", convexity},
      {"corner flux", corner_fluxes},
  };
  int failed = 0, n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", n, name, seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
