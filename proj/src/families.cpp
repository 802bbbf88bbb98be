#include "iml/families.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace iml {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double sq(double v) { return v * v; }

}  // namespace

std::string Family::name() const {
  switch (tag) {
    case FamilyTag::FlatALE: return "flat-ale";
    case FamilyTag::FlatALF: return "flat-alf";
    case FamilyTag::FlatAF: return "flat-af";
    case FamilyTag::EuclideanR4: return "euclidean";
    case FamilyTag::Kerr: return "kerr";
    case FamilyTag::Schwarzschild: return "schwarzschild";
    case FamilyTag::ReissnerNordstrom: return "rn";
    case FamilyTag::TaubNUT: return "taub-nut";
    case FamilyTag::TaubBolt: return "taub-bolt";
    case FamilyTag::ChargedTaubBolt: return "charged-taub-bolt";
    case FamilyTag::EguchiHanson: return "eguchi-hanson";
    case FamilyTag::ChenTeoAsymptotic: return "chen-teo";
  }
  return "unknown";
}

double BrillSample::form(const Eigen::Vector2d& u, const Eigen::Vector2d& v) const {
  if (!has_frames) return u.dot(G * v);
  return lam[0] * w[0].dot(u) * w[0].dot(v) + lam[1] * w[1].dot(u) * w[1].dot(v);
}

Family make_flat_ale(long p, long q) {
  require(p >= 1 && std::gcd(p, q) == 1, "flat ALE requires p >= 1 and gcd(p,q) = 1");
  Family f;
  f.tag = FamilyTag::FlatALE;
  f.p = p;
  f.q = q;
  f.chart_L = 1.0 / (2.0 * p);
  f.squared = true;
  return f;
}

Family make_euclidean() {
  Family f = make_flat_ale(1, 0);
  f.tag = FamilyTag::EuclideanR4;
  return f;
}

Family make_flat_alf(long k, double ell, double beta, bool h_modified) {
  require(k >= 1, "flat ALF requires k >= 1");
  require(ell > 0, "flat ALF requires ell > 0");
  const double q = 1.0 + k * beta * ell;
  require(std::fabs(q - std::round(q)) < 1e-12,
          "flat ALF twist must make 1 + k beta ell an integer");
  Family f;
  f.tag = FamilyTag::FlatALF;
  f.k = k;
  f.ell = ell;
  f.beta = beta;
  f.h_modified = h_modified;
  f.chart_L = ell;
  return f;
}

Family make_flat_af(double beta, double ell) {
  require(ell > 0, "flat AF requires ell > 0");
  Family f;
  f.tag = FamilyTag::FlatAF;
  f.beta = beta;
  f.ell = ell;
  f.chart_L = ell;
  return f;
}

Family make_kerr(double r_plus, double a) {
  require(a >= 0 && r_plus > a, "Kerr requires r_plus > a >= 0");
  Family f;
  f.tag = FamilyTag::Kerr;
  f.r_plus = r_plus;
  f.a = a;
  const double d = r_plus * r_plus - a * a;
  f.M = d / (2 * r_plus);
  f.beta = a / d;
  f.ell = 2 * r_plus * d / (r_plus * r_plus + a * a);
  f.chart_L = f.ell;
  f.chart_s = r_plus - f.M;
  f.shift = f.M;
  return f;
}

Family make_rn(double r_plus, double c1, double ell) {
  require(r_plus > 0 && r_plus * r_plus > c1, "RN requires r_plus > 0 and r_plus^2 > c1");
  Family f;
  f.tag = FamilyTag::ReissnerNordstrom;
  f.r_plus = r_plus;
  f.c1 = c1;
  f.M = (r_plus * r_plus + c1) / (2 * r_plus);
  f.chart_s = r_plus - f.M;
  f.ell_override = ell > 0;
  f.ell = f.ell_override ? ell : 2 * r_plus * r_plus * r_plus / (r_plus * r_plus - c1);
  f.chart_L = f.ell;
  f.shift = f.M;
  return f;
}

Family make_rn_mc(double M, double c1, double ell) {
  require(c1 <= M * M, "RN requires c1 <= M^2");
  const double s = std::sqrt(M * M - c1);
  require(M + s > 0, "RN requires r_plus = M + sqrt(M^2 - c1) > 0");
  // r_+ from the larger root keeps the rod half-length equal to s exactly.
  Family f = make_rn(M + s, c1, ell);
  f.M = M;
  f.chart_s = s;
  f.shift = M;
  return f;
}

Family make_schwarzschild(double M) {
  require(M > 0, "Schwarzschild requires M > 0");
  Family f = make_rn(2 * M, 0.0);
  f.tag = FamilyTag::Schwarzschild;
  f.M = M;
  f.chart_s = M;
  f.shift = M;
  f.ell = 4 * M;
  f.chart_L = f.ell;
  return f;
}

Family make_charged_taub_bolt(double r_plus, double ell) {
  require(ell > 0 && r_plus > ell / 4, "charged Taub-Bolt requires r_plus > ell/4 > 0");
  Family f;
  f.tag = FamilyTag::ChargedTaubBolt;
  f.r_plus = r_plus;
  f.ell = ell;
  f.chart_L = ell;
  f.chart_s = r_plus * r_plus / ell - ell / 16;
  f.shift = r_plus + ell / 16 - r_plus * r_plus / ell;
  return f;
}

Family make_taub_bolt(double ell) {
  require(ell > 0, "Taub-Bolt requires ell > 0");
  Family f = make_charged_taub_bolt(ell / 2, ell);
  f.tag = FamilyTag::TaubBolt;
  f.chart_s = 3 * ell / 16;
  f.shift = 5 * ell / 16;
  return f;
}

Family make_taub_nut(double ell) {
  require(ell > 0, "Taub-NUT requires ell > 0");
  Family f;
  f.tag = FamilyTag::TaubNUT;
  f.ell = ell;
  f.chart_L = ell;
  return f;
}

Family make_eguchi_hanson(double a) {
  require(a > 0, "Eguchi-Hanson requires a > 0");
  Family f;
  f.tag = FamilyTag::EguchiHanson;
  f.a = a;
  f.chart_L = 0.25;
  f.chart_s = a * a;
  f.squared = true;
  return f;
}

ChenTeoForms chen_teo_forms(double kappa, double xi) {
  require(kappa > 0, "Chen-Teo requires kappa > 0");
  require(xi > 0.5 && xi < 1.0 / std::sqrt(2.0), "Chen-Teo requires xi in (1/2, 1/sqrt 2)");
  ChenTeoForms c;
  const double xi2 = xi * xi, xi4 = xi2 * xi2;
  const double one4 = 1 - 4 * xi4;
  const double poly = 2 * xi2 - 2 * xi + 1;
  const double sk = std::sqrt(kappa);
  c.ell = 8 * sk * xi4 / (std::sqrt(one4) * poly * poly);
  c.beta = sq(1 - xi) * std::sqrt(one4) / (2 * sk * xi2);
  c.mass_raw = 2 * kPi * c.ell * sq(1 + 2 * xi2) * sk / std::sqrt(one4);
  c.mass_substituted = 16 * kPi * kappa * xi4 * sq(1 + 2 * xi2) / (one4 * poly * poly);
  c.c_alpha = 0.5 * (1 + 2 * xi2) * std::sqrt(kappa * one4) / (1 - 2 * xi2);
  c.c_V = sk * sq(1 + 2 * xi2) / std::sqrt(one4);
  c.mass_coefficients = 2 * kPi * c.ell * (4 * c.c_alpha - c.c_V);
  return c;
}

Family make_chen_teo(double kappa, double xi) {
  ChenTeoForms c = chen_teo_forms(kappa, xi);
  Family f;
  f.tag = FamilyTag::ChenTeoAsymptotic;
  f.kappa = kappa;
  f.xi = xi;
  f.ell = c.ell;
  f.beta = c.beta;
  f.chart_L = c.ell;
  return f;
}

std::pair<double, double> kerr_mass_forms(double r_plus, double a) {
  Family f = make_kerr(r_plus, a);
  const double d = r_plus * r_plus - a * a;
  return {4 * kPi * f.M * f.ell, 4 * kPi * d * d / (r_plus * r_plus + a * a)};
}

namespace {

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              const double* fallback = nullptr) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback) return *fallback;
    throw std::invalid_argument("missing parameter '" + key + "'");
  }
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (*end || it->second.empty()) throw std::invalid_argument("bad numeric value for '" + key + "'");
  return v;
}

}  // namespace

Family family_from_kv(const std::map<std::string, std::string>& kv) {
  auto it = kv.find("family");
  if (it == kv.end()) throw std::invalid_argument("missing 'family'");
  const std::string& n = it->second;
  const double zero = 0.0, one = 1.0;
  if (n == "kerr") return make_kerr(kv_num(kv, "r_plus"), kv_num(kv, "a"));
  if (n == "schwarzschild") return make_schwarzschild(kv_num(kv, "M"));
  if (n == "rn" || n == "reissner-nordstrom") {
    const double ell = kv_num(kv, "l", &zero);
    if (kv.count("M")) return make_rn_mc(kv_num(kv, "M"), kv_num(kv, "c1"), ell);
    return make_rn(kv_num(kv, "r_plus"), kv_num(kv, "c1"), ell);
  }
  if (n == "taub-nut") return make_taub_nut(kv_num(kv, "l"));
  if (n == "taub-bolt") return make_taub_bolt(kv_num(kv, "l"));
  if (n == "charged-taub-bolt") return make_charged_taub_bolt(kv_num(kv, "r_plus"), kv_num(kv, "l"));
  if (n == "eguchi-hanson") return make_eguchi_hanson(kv_num(kv, "a"));
  if (n == "euclidean") return make_euclidean();
  if (n == "flat-ale")
    return make_flat_ale(std::lround(kv_num(kv, "p")), std::lround(kv_num(kv, "q")));
  if (n == "flat-alf")
    return make_flat_alf(std::lround(kv_num(kv, "k", &one)), kv_num(kv, "l"), kv_num(kv, "beta", &zero),
                         kv_num(kv, "h", &zero) != 0.0);
  if (n == "flat-af") return make_flat_af(kv_num(kv, "beta", &zero), kv_num(kv, "l"));
  if (n == "chen-teo") return make_chen_teo(kv_num(kv, "kappa"), kv_num(kv, "xi"));
  throw std::invalid_argument("unknown family '" + n + "'");
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open parameter file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("parameter file: expected key=value, got '" + line + "'");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, double> derived_constants(const Family& f) {
  std::map<std::string, double> d;
  d["ell"] = f.ell;
  d["beta"] = f.beta;
  switch (f.tag) {
    case FamilyTag::Kerr:
    case FamilyTag::Schwarzschild:
    case FamilyTag::ReissnerNordstrom:
      d["M"] = f.M;
      d["r_plus"] = f.r_plus;
      break;
    case FamilyTag::ChargedTaubBolt:
    case FamilyTag::TaubBolt:
      d["c"] = f.shift;
      d["r_plus"] = f.r_plus;
      break;
    default:
      break;
  }
  if (f.tag == FamilyTag::FlatALE || f.tag == FamilyTag::EuclideanR4 || f.tag == FamilyTag::EguchiHanson)
    d.erase("ell");
  if (f.has_sampler()) {
    const RodDataSet r = family_rod_data(f);
    for (std::size_t i = 0; i < r.turning_points.size(); ++i)
      d["z" + std::to_string(i + 1)] = r.turning_points[i];
  }
  d["exact_mass"] = exact_mass(f);
  return d;
}

ChartPoint invert_chart(const Family& f, double rho, double z) {
  if (!(rho >= 0)) throw std::domain_error("sample point must have rho >= 0");
  const double rh = rho / f.chart_L, zh = z / f.chart_L, s = f.chart_s;
  ChartPoint c;
  const double az = std::fabs(zh);
  if (s == 0.0) {
    const double R = std::hypot(rh, zh);
    if (R == 0.0) throw std::domain_error("sample point at the chart origin");
    c.x = R;
    c.xms = c.xps = R;
    c.f = R * R;
    c.cos_t = zh / R;
    c.sin_t = rh / R;
    const double small = rh * rh / (R * (R + az));
    if (zh >= 0) {
      c.omc = small;
      c.opc = 1 + c.cos_t;
    } else {
      c.opc = small;
      c.omc = 1 - c.cos_t;
    }
    return c;
  }
  const double a = std::fabs(zh - s), b = std::fabs(zh + s);
  const double Rp = std::hypot(rh, zh - s), Rm = std::hypot(rh, zh + s);
  const double r2 = rh * rh;
  const double dp = (Rp + a) > 0 ? r2 / (Rp + a) : 0.0;
  const double dm = (Rm + b) > 0 ? r2 / (Rm + b) : 0.0;
  const double S = Rp + Rm;
  c.xms = std::max(az - s, 0.0) + 0.5 * (dp + dm);
  c.x = s + c.xms;
  c.xps = c.x + s;
  c.f = c.xms * c.xps;
  c.cos_t = 2 * zh / S;
  const double t = 2 * std::max(s - az, 0.0) + dp + dm;
  c.sin_t = std::sqrt(t * (S + 2 * az)) / S;
  if (zh >= 0) {
    c.omc = t / S;
    c.opc = 1 + c.cos_t;
  } else {
    c.opc = t / S;
    c.omc = 1 - c.cos_t;
  }
  return c;
}

ChartPoint chart_from_polar(const Family& f, double r, double theta) {
  double x, tau;
  if (f.squared) {
    x = r * r;
    tau = 2 * theta;
  } else {
    x = r - f.shift;
    tau = theta;
  }
  const double s = f.chart_s;
  if (!(x >= s) || (s == 0.0 && x <= 0.0))
    throw std::domain_error(f.name() + ": radius below the horizon, bolt or origin");
  ChartPoint c;
  c.x = x;
  c.xms = x - s;
  c.xps = x + s;
  c.f = c.xms * c.xps;
  c.cos_t = std::cos(tau);
  c.sin_t = std::sin(tau);
  const double h = std::sin(0.5 * tau), g = std::cos(0.5 * tau);
  c.omc = 2 * h * h;
  c.opc = 2 * g * g;
  return c;
}

std::pair<double, double> coordinate_transform(const Family& f, double r, double theta) {
  if (!f.has_sampler()) throw std::domain_error("family provides asymptotic data only");
  const ChartPoint c = chart_from_polar(f, r, theta);
  return {f.chart_L * std::sqrt(c.f) * c.sin_t, f.chart_L * c.x * c.cos_t};
}

std::pair<double, double> inverse_transform(const Family& f, double rho, double z) {
  const ChartPoint c = invert_chart(f, rho, z);
  const double tau = std::atan2(c.sin_t, c.cos_t);
  if (f.squared) return {std::sqrt(c.x), 0.5 * tau};
  return {c.x + f.shift, tau};
}

std::pair<double, double> coordinate_transform(const AsymptoticClass& c, double r, double theta) {
  if (c.kind == AsymptoticKind::ALE) {
    const double R = r * r / (2.0 * c.p);
    return {R * std::sin(2 * theta), R * std::cos(2 * theta)};
  }
  return {c.ell * r * std::sin(theta), c.ell * r * std::cos(theta)};
}

namespace {

// G = lam0 w0 w0^T + lam1 w1 w1^T.
Eigen::Matrix2d frame_matrix(double lam0, const Eigen::Vector2d& w0, double lam1, const Eigen::Vector2d& w1) {
  return lam0 * w0 * w0.transpose() + lam1 * w1 * w1.transpose();
}

struct Frames {
  double lam[2] = {0, 0};
  Eigen::Vector2d w[2];
  double alpha = 0;
};

Frames frames(const Family& f, const ChartPoint& c) {
  Frames F;
  const double st2 = c.sin_t * c.sin_t;
  switch (f.tag) {
    case FamilyTag::FlatAF: {
      const double r = c.x;
      F.lam[0] = f.ell * f.ell;
      F.w[0] = {0, 1};
      F.lam[1] = r * r * st2;
      F.w[1] = {1, f.beta * f.ell};
      F.alpha = -std::log(f.ell);
      break;
    }
    case FamilyTag::FlatALF: {
      const double r = c.x;
      const double h = f.h_modified ? 1 + f.k * f.ell / (2 * r) : 1.0;
      const double cc = 0.5 * c.opc;  // cos^2(theta/2)
      const double bl = f.beta * f.ell;
      F.lam[0] = f.ell * f.ell / h;
      F.w[0] = {f.k * cc, 1 + f.k * cc * bl};
      F.lam[1] = h * r * r * st2;
      F.w[1] = {1, bl};
      F.alpha = 0.5 * std::log(h) - std::log(f.ell);
      break;
    }
    case FamilyTag::FlatALE:
    case FamilyTag::EuclideanR4: {
      const double x = c.x, p = double(f.p);
      F.lam[0] = x * 0.5 * c.omc / (p * p);
      F.w[0] = {1, 0};
      F.lam[1] = x * 0.5 * c.opc;
      F.w[1] = {double(f.q) / p, 1};
      F.alpha = 0.5 * std::log(p * p / x);
      break;
    }
    case FamilyTag::Kerr: {
      const double r = c.x + f.M, a = f.a, bl = f.beta * f.ell;
      const double Sigma = r * r - a * a * c.cos_t * c.cos_t;
      F.lam[0] = c.f / Sigma;
      F.w[0] = {a * st2, f.ell * (1 + a * f.beta * st2)};
      F.lam[1] = st2 / Sigma;
      F.w[1] = {r * r - a * a, bl * c.xms * (r + f.r_plus)};
      F.alpha = 0.5 * std::log(Sigma / (f.ell * f.ell * (c.f + f.chart_s * f.chart_s * st2)));
      break;
    }
    case FamilyTag::Schwarzschild:
    case FamilyTag::ReissnerNordstrom: {
      const double r = c.x + f.M;
      F.lam[0] = r * r * st2;
      F.w[0] = {1, 0};
      F.lam[1] = f.ell * f.ell * c.f / (r * r);
      F.w[1] = {0, 1};
      F.alpha = 0.5 * std::log(r * r / (f.ell * f.ell * (c.f + f.chart_s * f.chart_s * st2)));
      break;
    }
    case FamilyTag::TaubNUT: {
      const double r = c.x, l = f.ell;
      F.lam[0] = l * l * r / (r + 0.5 * l);
      F.w[0] = {0.5 * c.opc, 1};
      F.lam[1] = r * (r + 0.5 * l) * st2;
      F.w[1] = {1, 0};
      F.alpha = 0.5 * std::log((1 + l / (2 * r)) / (l * l));
      break;
    }
    case FamilyTag::TaubBolt:
    case FamilyTag::ChargedTaubBolt: {
      const double r = c.x + f.shift, l = f.ell;
      const double qq = (r - 0.25 * l) * (r + 0.25 * l);
      F.lam[0] = l * l * c.f / qq;
      F.w[0] = {0.5 * c.opc, 1};
      F.lam[1] = qq * st2;
      F.w[1] = {1, 0};
      F.alpha = 0.5 * std::log(qq / (l * l * (c.f + f.chart_s * f.chart_s * st2)));
      break;
    }
    case FamilyTag::EguchiHanson: {
      const double x = c.x, s = f.chart_s;
      F.lam[0] = c.f / (4 * x);
      F.w[0] = {1, c.opc};
      F.lam[1] = 0.25 * x * st2;
      F.w[1] = {0, 1};
      F.alpha = 0.5 * std::log(4 * x / (c.f + s * s * st2));
      break;
    }
    case FamilyTag::ChenTeoAsymptotic:
      throw std::domain_error("Chen-Teo is shipped as asymptotic data only");
  }
  return F;
}

// Contraction of frame k with an integer vector, written so that the exact
// integer part cancels before the small chart quantity enters.
double frame_dot(const Family& f, const ChartPoint& c, const Frames& F, int k, const RodStructure& v) {
  const double v1 = double(v.v1), v2 = double(v.v2);
  // Near cos(tau) = 1 the frame carries 1 - omc/2 and loses the small
  // part; elsewhere the plain contraction is accurate.
  const bool north = c.cos_t >= 0;
  switch (f.tag) {
    case FamilyTag::FlatALF:
      if (k == 0 && north) {
        const double bl = f.beta * f.ell;
        const double u = v1 + bl * v2;
        return (f.k * u + v2) - f.k * 0.5 * c.omc * u;
      }
      break;
    case FamilyTag::TaubNUT:
    case FamilyTag::TaubBolt:
    case FamilyTag::ChargedTaubBolt:
      if (k == 0 && north) return (v1 + v2) - v1 * 0.5 * c.omc;
      break;
    case FamilyTag::EguchiHanson:
      if (k == 0 && north) return (v1 + 2 * v2) - v2 * c.omc;
      break;
    case FamilyTag::FlatALE:
    case FamilyTag::EuclideanR4:
      if (k == 1) return (double(f.q) * v1 + double(f.p) * v2) / double(f.p);
      break;
    default:
      break;
  }
  return F.w[k].dot(Eigen::Vector2d(v1, v2));
}

}  // namespace

BrillSample sample_chart(const Family& f, const ChartPoint& c, double rho, double z) {
  const Frames F = frames(f, c);
  BrillSample b;
  b.rho = rho;
  b.z = z;
  b.alpha = F.alpha;
  b.G = frame_matrix(F.lam[0], F.w[0], F.lam[1], F.w[1]);
  b.has_frames = true;
  for (int k = 0; k < 2; ++k) {
    b.lam[k] = F.lam[k];
    b.w[k] = F.w[k];
  }
  return b;
}

BrillSample sample_brill(const Family& f, double rho, double z) {
  if (!f.has_sampler()) throw std::domain_error("Chen-Teo is shipped as asymptotic data only");
  return sample_chart(f, invert_chart(f, rho, z), rho, z);
}

double torus_norm2(const Family& f, double rho, double z, const RodStructure& v) {
  const ChartPoint c = invert_chart(f, rho, z);
  const Frames F = frames(f, c);
  const double d0 = frame_dot(f, c, F, 0, v), d1 = frame_dot(f, c, F, 1, v);
  return F.lam[0] * d0 * d0 + F.lam[1] * d1 * d1;
}

RodDataSet family_rod_data(const Family& f) {
  RodDataSet r;
  const double zt = f.chart_L * f.chart_s;
  switch (f.tag) {
    case FamilyTag::FlatAF:
      r.rods = {{1, 0}};
      break;
    case FamilyTag::FlatALF: {
      const long q = std::lround(1.0 + f.k * f.beta * f.ell);
      r.turning_points = {0.0};
      r.rods = {{1, 0}, {-q, f.k}};
      break;
    }
    case FamilyTag::FlatALE:
    case FamilyTag::EuclideanR4:
      r.turning_points = {0.0};
      r.rods = {{0, 1}, {f.p, -f.q}};
      break;
    case FamilyTag::Kerr:
    case FamilyTag::Schwarzschild:
    case FamilyTag::ReissnerNordstrom:
      r.turning_points = {-zt, zt};
      r.rods = {{1, 0}, {0, 1}, {1, 0}};
      break;
    case FamilyTag::TaubNUT:
      r.turning_points = {0.0};
      r.rods = {{1, 0}, {1, -1}};
      break;
    case FamilyTag::TaubBolt:
    case FamilyTag::ChargedTaubBolt:
      r.turning_points = {-zt, zt};
      r.rods = {{1, 0}, {0, 1}, {1, -1}};
      break;
    case FamilyTag::EguchiHanson:
      r.turning_points = {-zt, zt};
      r.rods = {{0, 1}, {1, 0}, {2, -1}};
      break;
    case FamilyTag::ChenTeoAsymptotic:
      throw std::domain_error("Chen-Teo rod data is not shipped");
  }
  return r;
}

double exact_mass(const Family& f) {
  switch (f.tag) {
    case FamilyTag::Kerr:
    case FamilyTag::Schwarzschild:
    case FamilyTag::ReissnerNordstrom:
      return 4 * kPi * f.M * f.ell;
    case FamilyTag::TaubNUT:
      return kPi * f.ell * f.ell;
    case FamilyTag::TaubBolt:
      return 5 * kPi * f.ell * f.ell / 4;
    case FamilyTag::ChargedTaubBolt:
      return 4 * kPi * f.ell * f.shift;
    case FamilyTag::ChenTeoAsymptotic:
      return chen_teo_forms(f.kappa, f.xi).mass_raw;
    default:
      return 0.0;
  }
}

AsymptoticClass default_model(const Family& f) {
  switch (f.tag) {
    case FamilyTag::FlatALE:
    case FamilyTag::EuclideanR4:
      return AsymptoticClass::ale(f.p, f.q);
    case FamilyTag::EguchiHanson:
      return AsymptoticClass::ale(2, 1);
    case FamilyTag::FlatALF:
      return AsymptoticClass::alf(f.k, f.ell, f.h_modified);
    case FamilyTag::TaubNUT:
    case FamilyTag::TaubBolt:
    case FamilyTag::ChargedTaubBolt:
      return AsymptoticClass::alf(1, f.ell, false);
    default:
      return AsymptoticClass::af(f.beta, f.ell);
  }
}

Family model_family(const AsymptoticClass& c) {
  switch (c.kind) {
    case AsymptoticKind::ALE:
      return make_flat_ale(c.p, c.q);
    case AsymptoticKind::ALF:
      return make_flat_alf(c.k, c.ell, 0.0, c.h_modified);
    case AsymptoticKind::AF:
      return make_flat_af(c.beta, c.ell);
  }
  return make_flat_af(0.0, 1.0);
}

double reduction_beta_ell(const AsymptoticClass& c) {
  return c.kind == AsymptoticKind::AF ? c.beta * c.ell : 0.0;
}

}  // namespace iml
