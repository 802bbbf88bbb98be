#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iml/comparison.hpp"
#include "iml/defects.hpp"
#include "iml/families.hpp"
#include "iml/io.hpp"
#include "iml/mass.hpp"
#include "iml/rod_model.hpp"
#include "iml/solver.hpp"

using namespace iml;

namespace {

// Numeric failure that should end the run with status 2.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FamilyArgs {
  std::string params, family;
  std::map<std::string, std::string> values;

  void add(CLI::App* app) {
    app->add_option("--params", params, "key=value family parameter file");
    app->add_option("--family", family, "family name, e.g. kerr, taub-nut, rn");
    static const char* keys[][2] = {{"--l", "l"},       {"--M", "M"},   {"--r-plus", "r_plus"}, {"--a", "a"},
                                    {"--c1", "c1"},     {"--k", "k"},   {"--p", "p"},           {"--q", "q"},
                                    {"--beta", "beta"}, {"--h-modified", "h"},   {"--kappa", "kappa"},   {"--xi", "xi"}};
    for (auto& k : keys) app->add_option(k[0], values[k[1]], std::string("family parameter ") + k[1]);
  }

  bool given() const { return !params.empty() || !family.empty(); }

  std::map<std::string, std::string> kv() const {
    std::map<std::string, std::string> out;
    if (!params.empty()) out = read_kv_file(params);
    if (!family.empty()) out["family"] = family;
    for (const auto& [k, v] : values)
      if (!v.empty()) out[k] = v;
    return out;
  }

  Family make() const {
    if (!given()) throw std::invalid_argument("need --params or --family");
    return family_from_kv(kv());
  }
};

Json params_json(const Family& f, const std::map<std::string, std::string>& kv) {
  Json p = Json::object();
  for (const auto& [k, v] : kv) p[k] = v;
  Json d = Json::object();
  for (const auto& [k, v] : derived_constants(f)) d[k] = v;
  p["derived"] = d;
  const RodDataSet r = family_rod_data(f);
  p["turning_points"] = r.turning_points;
  Json rods = Json::array();
  for (const RodStructure& v : r.rods) rods.push_back({v.v1, v.v2});
  p["rods"] = rods;
  return p;
}

void emit(const Json& j, const std::string& out) {
  const std::string s = dump_json(j);
  if (out.empty()) {
    std::cout << s;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::invalid_argument("cannot write " + out);
  f << s;
}

void write_columns(const std::string& path, const std::string& header,
                   const std::vector<std::pair<double, double>>& xy) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << "# " << header << '\n';
  for (const auto& [x, y] : xy) f << format_number(x) << ' ' << format_number(y) << '\n';
}

double rel_err(double got, double want) {
  return want != 0 ? std::fabs(got - want) / std::fabs(want) : std::fabs(got);
}

Json violation_json(const Violation& v) {
  static const char* kinds[] = {"coprimality", "zero-vector", "ordering", "admissibility", "distinctness", "count"};
  return {{"index", v.index}, {"kind", kinds[int(v.kind)]}, {"message", v.message}};
}

int run_validate(const std::string& rods_path, const FamilyArgs& fa, const std::string& out) {
  Json j = Json::object();
  if (!rods_path.empty()) {
    const RodDataSet r = read_rod_file(rods_path);
    const ValidationReport rep = validate_rod_data(r);
    j["rods"] = rods_path;
    j["status"] = rep.valid() ? "valid" : "invalid";
    Json v = Json::array();
    for (const Violation& x : rep.violations) v.push_back(violation_json(x));
    j["violations"] = v;
    if (rep.valid()) j["cross_section"] = asymptotic_topology(r).str();
    emit(j, out);
    return rep.valid() ? 0 : 1;
  }
  const Family f = fa.make();
  j["family"] = f.name();
  j["status"] = "valid";
  j["params"] = params_json(f, fa.kv());
  j["model"] = default_model(f).tag();
  emit(j, out);
  return 0;
}

int run_mass(const FamilyArgs& fa, const std::string& out, const std::string& plot) {
  const Family f = fa.make();
  const AsymptoticClass c = default_model(f);
  Json j = Json::object();
  j["family"] = f.name();
  j["params"] = params_json(f, fa.kv());
  j["model"] = c.tag();
  const double exact = exact_mass(f);
  double mass = exact;
  if (f.has_sampler()) {
    MassEstimate m;
    try {
      m = estimate_mass(f, c);
    } catch (const std::runtime_error& e) {
      throw NonConvergence(e.what());
    }
    j["radii"] = m.radii;
    j["flux"] = m.fluxes;
    mass = m.extrapolated;
    j["fit_exponent"] = m.fit_exponent;
    j["fit_residual"] = m.residual;
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 0; i < m.radii.size(); ++i) xy.push_back({m.radii[i], m.fluxes[i]});
    write_columns(plot, "radius flux", xy);
  } else {
    j["radii"] = Json::array();
    j["flux"] = Json::array();
  }
  j["mass"] = mass;
  j["exact_mass"] = exact;
  j["rel_err"] = rel_err(mass, exact);
  emit(j, out);
  return 0;
}

int run_defects(const FamilyArgs& fa, const std::string& out, const std::string& csv, const std::string& plot) {
  const Family f = fa.make();
  std::vector<DefectProfile> prof;
  try {
    prof = defect_profiles(f);
  } catch (const std::runtime_error& e) {
    throw NonConvergence(e.what());
  }
  const RodDataSet r = family_rod_data(f);
  Json j = Json::object();
  j["family"] = f.name();
  j["params"] = params_json(f, fa.kv());
  Json rods = Json::array();
  std::vector<std::pair<double, double>> xy;
  std::ostringstream rows;
  rows << "rod,z,theta\n";
  for (const DefectProfile& p : prof) {
    const RodStructure& v = r.rods[p.rod_index];
    rods.push_back({{"rod", p.rod_index},
                    {"structure", {v.v1, v.v2}},
                    {"case", rod_case_name(p.rod_case)},
                    {"finite", p.finite},
                    {"z_lo", p.z_lo},
                    {"z_hi", p.z_hi},
                    {"integral", p.integral}});
    for (const auto& [z, t] : p.samples) {
      rows << p.rod_index << ',' << format_number(z) << ',' << format_number(t) << '\n';
      xy.push_back({z, t});
    }
  }
  j["rods"] = rods;
  j["finite_defect_integral"] = finite_defect_integral(prof);
  if (!csv.empty()) {
    std::ofstream c(csv);
    if (!c) throw std::invalid_argument("cannot write " + csv);
    c << rows.str();
  }
  write_columns(plot, "z theta", xy);
  emit(j, out);
  return 0;
}

struct SolveArgs {
  std::string rods, model, grid = "129x257", out_csv, plot;
  double tol = 1e-8, omega = 1.95, grading = 2.0, extent = 0, perturb = 0;
  int max_sweeps = 10000;
};

int run_solve(const SolveArgs& a, const FamilyArgs& fa, const std::string& out) {
  ModelMap m;
  if (!a.rods.empty()) {
    if (a.model.empty()) throw std::invalid_argument("solve: --rods needs --model");
    m = build_model_map(read_rod_file(a.rods), parse_class(a.model));
  } else {
    const Family f = fa.make();
    const AsymptoticClass c = a.model.empty() ? default_model(f) : parse_class(a.model);
    m = build_model_map(family_rod_data(f), c);
  }
  SolverConfig cfg;
  std::tie(cfg.n_rho, cfg.n_z) = parse_grid(a.grid);
  cfg.tolerance = a.tol;
  cfg.max_sweeps = a.max_sweeps;
  cfg.omega = a.omega;
  cfg.grading = a.grading;
  cfg.R = cfg.z_max = a.extent;
  HyperbolicField f = make_field(m, cfg);
  const double R = f.grid.rho.back();
  for (std::size_t jj = 0; jj < f.grid.z.size(); ++jj)
    for (std::size_t i = 0; i < f.grid.rho.size(); ++i) {
      const double dr = f.grid.rho[i] - 0.075 * R, dz = f.grid.z[jj] - 0.05 * R;
      f.u(i, jj) = a.perturb * std::exp(-(dr * dr + dz * dz) / (0.1 * R));
    }
  const RelaxResult res = relax(f, cfg);
  const auto& rep = res.report;
  bool monotone = true;
  std::vector<std::pair<double, double>> xy;
  for (std::size_t k = 0; k < rep.energy_history.size(); ++k) {
    if (k > 0 && rep.energy_history[k] > rep.energy_history[k - 1] + 1e-12) monotone = false;
    xy.push_back({double(k), rep.energy_history[k]});
  }
  double dist = 0;
  for (std::size_t jj = 0; jj < f.grid.z.size(); ++jj)
    for (std::size_t i = 1; i < f.grid.rho.size(); ++i) {
      const HyperbolicPoint p = res.field.value(int(i), int(jj));
      const HyperbolicPoint q = m.value(f.grid.rho[i], f.grid.z[jj]);
      dist = std::max(dist, h2_distance(p, q));
    }
  if (!a.out_csv.empty()) {
    std::ofstream c(a.out_csv);
    if (!c) throw std::invalid_argument("cannot write " + a.out_csv);
    write_field_csv(c, res.field.header(), res.field.rows());
  }
  write_columns(a.plot, "sweep energy", xy);
  Json j = Json::object();
  j["model"] = m.cls.tag();
  j["model_map"] = m.description;
  j["grid"] = {cfg.n_rho, cfg.n_z};
  j["extent"] = R;
  j["perturbation"] = a.perturb;
  j["sweeps"] = rep.sweeps;
  j["converged"] = rep.converged;
  j["residual"] = rep.final_residual;
  j["tolerance"] = cfg.tolerance;
  j["energy_initial"] = rep.energy_history.front();
  j["energy_final"] = rep.energy_history.back();
  j["energy_monotone"] = monotone;
  j["max_h2_distance_to_model"] = dist;
  emit(j, out);
  return rep.converged ? 0 : 2;
}

Json gap_json(const TheoremGapReport& g) {
  return {{"mass_g", g.mass_g},
          {"mass_o", g.mass_o},
          {"exact_mass_g", g.exact_mass_g},
          {"exact_mass_o", g.exact_mass_o},
          {"defect_term", g.defect_term},
          {"slack", g.slack},
          {"tol", g.tol},
          {"equality", g.equality},
          {"max_h2_distance", g.max_h2_distance}};
}

int run_compare(const std::string& rn, double ell, bool exact, const std::string& out) {
  const std::vector<double> mc = parse_list(rn);
  if (mc.size() != 2) throw std::invalid_argument("compare: --rn expects M,c1");
  const Family g = make_rn_mc(mc[0], mc[1], ell);
  const Family o = schwarzschild_partner(g);
  const PForms P = rn_vs_schwarzschild_P(mc[0], mc[1]);
  GapOptions opt;
  opt.flux_masses = !exact;
  TheoremGapReport rep;
  try {
    rep = theorem_gap(g, o, opt);
  } catch (const std::runtime_error& e) {
    throw NonConvergence(e.what());
  }
  Json j = Json::object();
  j["M"] = mc[0];
  j["c1"] = mc[1];
  j["ell"] = g.ell;
  j["geometry"] = g.name();
  j["partner"] = o.name();
  j["partner_mass_parameter"] = o.chart_s;
  j["P"] = {{"reduced", P.reduced}, {"x_form", P.x_form}, {"full", P.full(g.ell)}};
  j["report"] = gap_json(rep);
  j["closed_form_slack"] = P.full(g.ell);
  j["rel_diff"] = rel_err(rep.slack, P.full(g.ell));
  emit(j, out);
  return 0;
}

std::vector<double> range(const std::string& s, const char* what) {
  const std::vector<double> r = parse_list(s);
  if (r.size() != 3 || r[2] < 1 || r[2] != std::round(r[2]))
    throw std::invalid_argument(std::string("sweep: --") + what + " expects lo,hi,n");
  std::vector<double> out;
  const int n = int(r[2]);
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? r[0] : r[0] + (r[1] - r[0]) * i / (n - 1));
  return out;
}

int run_sweep(const std::string& ms, const std::string& cs, double ell, const std::string& csv,
              const std::string& plot, const std::string& out) {
  std::ostringstream rows;
  rows << "M,c1,P,slack\n";
  int points = 0, skipped = 0;
  double min_P = INFINITY, min_slack = INFINITY, worst = 0;
  std::vector<std::pair<double, double>> xy;
  for (double M : range(ms, "m"))
    for (double c1 : range(cs, "c1")) {
      const double s2 = M * M - c1;
      if (s2 < 0 || M + std::sqrt(s2) <= 0 || c1 == M * M) {
        ++skipped;
        continue;
      }
      const Family g = make_rn_mc(M, c1, ell);
      const PForms P = rn_vs_schwarzschild_P(M, c1);
      GapOptions opt;
      opt.flux_masses = false;
      TheoremGapReport rep;
      try {
        rep = theorem_gap(g, schwarzschild_partner(g), opt);
      } catch (const std::runtime_error& e) {
        throw NonConvergence(e.what());
      }
      rows << format_number(M) << ',' << format_number(c1) << ',' << format_number(P.reduced) << ','
           << format_number(rep.slack) << '\n';
      xy.push_back({c1, P.reduced});
      ++points;
      min_P = std::min(min_P, P.reduced);
      min_slack = std::min(min_slack, rep.slack);
      worst = std::max(worst, std::fabs(rep.slack - P.full(g.ell)) / std::max(1.0, std::fabs(P.full(g.ell))));
    }
  write_columns(plot, "c1 P", xy);
  // Without --csv the rows go to stdout and the summary only to --out.
  if (csv.empty()) std::cout << rows.str();
  else {
    std::ofstream c(csv);
    if (!c) throw std::invalid_argument("cannot write " + csv);
    c << rows.str();
  }
  if (csv.empty() && out.empty()) return 0;
  Json j = Json::object();
  j["points"] = points;
  j["skipped"] = skipped;
  j["min_P"] = points ? min_P : 0.0;
  j["min_slack"] = points ? min_slack : 0.0;
  j["max_rel_diff"] = worst;
  emit(j, out);
  return 0;
}

int run_scalar(const FamilyArgs& fa, int n, unsigned long long seed, double tol, const std::string& out,
               const std::string& plot) {
  const Family f = fa.make();
  if (!f.has_sampler()) throw std::invalid_argument(f.name() + ": no sampler");
  const BrillSampler s = family_sampler(f);
  const auto pts = bulk_sample_points(f, n, seed);
  std::vector<double> R(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    const auto [rho, z] = pts[k];
    R[k] = scalar_curvature_extrapolated(s, rho, z);
  });
  double mx = 0, mean = 0;
  std::vector<std::pair<double, double>> xy;
  for (std::size_t k = 0; k < R.size(); ++k) {
    mx = std::max(mx, std::fabs(R[k]));
    mean += std::fabs(R[k]) / R.size();
    xy.push_back({double(k), R[k]});
  }
  write_columns(plot, "index R", xy);
  Json j = Json::object();
  j["family"] = f.name();
  j["params"] = params_json(f, fa.kv());
  j["points"] = n;
  j["seed"] = seed;
  j["max_abs_R"] = mx;
  j["mean_abs_R"] = mean;
  j["tol"] = tol;
  j["pass"] = mx <= tol;
  emit(j, out);
  return mx <= tol ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iml: toric instanton mass toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out;
  app.add_option("-o,--out", out, "write JSON here instead of stdout");

  auto* validate = app.add_subcommand("validate", "check a rod file or resolve a family");
  std::string rods;
  FamilyArgs fv;
  validate->add_option("--rods", rods, "rod data file");
  fv.add(validate);

  auto* mass = app.add_subcommand("mass", "flux mass of a family");
  FamilyArgs fm;
  std::string plot;
  fm.add(mass);
  mass->add_option("--dump-plot", plot, "write (radius, flux) columns");

  auto* defects = app.add_subcommand("defects", "angle defects along the axis rods");
  FamilyArgs fd;
  std::string csv;
  fd.add(defects);
  defects->add_option("--csv", csv, "per-rod (z, theta) rows");
  defects->add_option("--dump-plot", plot, "write (z, theta) columns");

  auto* solve = app.add_subcommand("solve", "relax the harmonic map equations");
  FamilyArgs fs;
  SolveArgs sa;
  fs.add(solve);
  solve->add_option("--rods", sa.rods, "rod data file (needs --model)");
  solve->add_option("--model", sa.model, "asymptotic class, e.g. AF(0,4)");
  solve->add_option("--grid", sa.grid, "NxM nodes in (rho, z)");
  solve->add_option("--tol", sa.tol, "sup residual tolerance");
  solve->add_option("--max-sweeps", sa.max_sweeps, "sweep limit");
  solve->add_option("--omega", sa.omega, "over-relaxation in (0,2)");
  solve->add_option("--grading", sa.grading, "axis grading strength");
  solve->add_option("--extent", sa.extent, "domain half size, 0 for automatic");
  solve->add_option("--perturb", sa.perturb, "amplitude of the starting bump in V");
  solve->add_option("--field-csv", sa.out_csv, "checkpoint the final field");
  solve->add_option("--dump-plot", sa.plot, "write (sweep, energy) columns");

  auto* compare = app.add_subcommand("compare", "RN against its Schwarzschild partner");
  std::string rn;
  double ell = 0;
  bool exact = false;
  compare->add_option("--rn", rn, "M,c1")->required();
  compare->add_option("--l", ell, "torus length, 0 for the regular value");
  compare->add_flag("--exact-masses", exact, "closed-form masses instead of fluxes");

  auto* sweep = app.add_subcommand("sweep", "P and slack over an (M, c1) grid");
  std::string mr = "0.5,2,4", cr = "-3,0.5,4";
  double sweep_ell = 0;
  sweep->add_option("--m", mr, "lo,hi,n");
  sweep->add_option("--c1", cr, "lo,hi,n");
  sweep->add_option("--l", sweep_ell, "torus length, 0 for the regular value");
  sweep->add_option("--csv", csv, "M,c1,P,slack rows");
  sweep->add_option("--dump-plot", plot, "write (c1, P) columns");

  auto* scalar = app.add_subcommand("scalar-check", "scalar curvature at bulk points");
  FamilyArgs fc;
  int npts = 100;
  unsigned long long seed = 1;
  double tol = 1e-6;
  fc.add(scalar);
  scalar->add_option("--points", npts, "number of points");
  scalar->add_option("--seed", seed, "sampling seed");
  scalar->add_option("--tol", tol, "bound on |R|");
  scalar->add_option("--dump-plot", plot, "write (index, R) columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*validate) return run_validate(rods, fv, out);
    if (*mass) return run_mass(fm, out, plot);
    if (*defects) return run_defects(fd, out, csv, plot);
    if (*solve) return run_solve(sa, fs, out);
    if (*compare) return run_compare(rn, ell, exact, out);
    if (*sweep) return run_sweep(mr, cr, sweep_ell, csv, plot, out);
    if (*scalar) return run_scalar(fc, npts, seed, tol, out, plot);
  } catch (const NonConvergence& e) {
    std::cerr << "iml: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "iml: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "iml: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "iml: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
