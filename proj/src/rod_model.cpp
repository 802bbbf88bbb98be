#include "iml/rod_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace iml {

AsymptoticClass AsymptoticClass::ale(long p, long q, double kappa) {
  if (p < 1 || std::gcd(p, q) != 1) throw std::invalid_argument("ALE requires p >= 1 and gcd(p,q) = 1");
  AsymptoticClass c;
  c.kind = AsymptoticKind::ALE;
  c.p = p;
  c.q = q;
  c.kappa = kappa;
  return c;
}

AsymptoticClass AsymptoticClass::alf(long k, double ell, bool h_modified, double kappa) {
  if (k < 1) throw std::invalid_argument("ALF requires k >= 1");
  if (!(ell > 0)) throw std::invalid_argument("ALF requires ell > 0");
  AsymptoticClass c;
  c.kind = AsymptoticKind::ALF;
  c.k = k;
  c.ell = ell;
  c.h_modified = h_modified;
  c.kappa = kappa;
  return c;
}

AsymptoticClass AsymptoticClass::af(double beta, double ell, double kappa) {
  if (!(ell > 0)) throw std::invalid_argument("AF requires ell > 0");
  AsymptoticClass c;
  c.kind = AsymptoticKind::AF;
  c.beta = beta;
  c.ell = ell;
  c.kappa = kappa;
  return c;
}

std::string AsymptoticClass::tag() const {
  char buf[128];
  switch (kind) {
    case AsymptoticKind::ALE:
      std::snprintf(buf, sizeof buf, "ALE(%ld,%ld)", p, q);
      break;
    case AsymptoticKind::ALF:
      std::snprintf(buf, sizeof buf, "ALF(%ld,%.17g)%s", k, ell, h_modified ? "h" : "");
      break;
    case AsymptoticKind::AF:
      std::snprintf(buf, sizeof buf, "AF(%.17g,%.17g)", beta, ell);
      break;
  }
  return buf;
}

std::string CrossSection::str() const {
  if (s1xs2) return "S1xS2";
  return "L(" + std::to_string(p) + "," + std::to_string(q) + ")";
}

bool valid_rod_structure(const RodStructure& r) {
  if (r.v1 == 0 && r.v2 == 0) return false;
  return std::gcd(std::labs(r.v1), std::labs(r.v2)) == 1;
}

long rod_det(const RodStructure& a, const RodStructure& b) { return a.v1 * b.v2 - a.v2 * b.v1; }

bool corner_admissible(const RodStructure& a, const RodStructure& b) {
  const long d = rod_det(a, b);
  return d == 1 || d == -1;
}

ValidationReport validate_rod_data(const RodDataSet& r) {
  ValidationReport rep;
  auto add = [&](int i, ViolationKind k, std::string m) { rep.violations.push_back({i, k, std::move(m)}); };
  if (r.rods.size() != r.turning_points.size() + 1)
    add(0, ViolationKind::Count,
        "expected " + std::to_string(r.turning_points.size() + 1) + " rods, got " +
            std::to_string(r.rods.size()));
  for (std::size_t i = 0; i < r.rods.size(); ++i) {
    const auto& v = r.rods[i];
    if (v.v1 == 0 && v.v2 == 0)
      add(int(i), ViolationKind::ZeroVector, "rod structure is (0,0)");
    else if (!valid_rod_structure(v))
      add(int(i), ViolationKind::Coprimality,
          "components (" + std::to_string(v.v1) + "," + std::to_string(v.v2) + ") not coprime");
  }
  for (std::size_t i = 0; i + 1 < r.turning_points.size(); ++i)
    if (!(r.turning_points[i] < r.turning_points[i + 1]))
      add(int(i + 1), ViolationKind::Ordering, "turning points not strictly increasing");
  for (std::size_t i = 0; i + 1 < r.rods.size(); ++i) {
    const auto& a = r.rods[i];
    const auto& b = r.rods[i + 1];
    if (a == b) add(int(i + 1), ViolationKind::Distinctness, "adjacent rods share a structure");
    if (!corner_admissible(a, b))
      add(int(i + 1), ViolationKind::Admissibility,
          "corner determinant " + std::to_string(rod_det(a, b)) + " not +-1");
  }
  return rep;
}

namespace {

long ext_gcd(long a, long b, long& x, long& y) {
  if (b == 0) {
    x = (a >= 0) ? 1 : -1;
    y = 0;
    return std::labs(a);
  }
  long x1, y1;
  const long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

}  // namespace

CrossSection asymptotic_topology(const RodDataSet& r) {
  if (r.rods.size() < 2) throw std::invalid_argument("asymptotic_topology: need two semi-infinite rods");
  const RodStructure first = r.rods.front();
  const RodStructure last = r.rods.back();
  if (!valid_rod_structure(first) || !valid_rod_structure(last))
    throw std::invalid_argument("asymptotic_topology: semi-infinite rod structures not coprime");
  long x, y;
  ext_gcd(first.v1, first.v2, x, y);
  // A = [[x, y], [-v2, v1]] has det 1 and maps the first rod to (1,0).
  const long X = x * last.v1 + y * last.v2;
  const long Y = -first.v2 * last.v1 + first.v1 * last.v2;
  CrossSection cs;
  if (Y == 0) {
    cs.s1xs2 = true;
    return cs;
  }
  const long p = std::labs(Y);
  long q = ((X * (Y > 0 ? 1 : -1)) % p + p) % p;
  if (q == 0) q = p;
  cs.p = p;
  cs.q = q;
  return cs;
}

RodDataSet read_rod_data(std::istream& in) {
  RodDataSet r;
  std::string line;
  int lineno = 0;
  bool closed = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, b, c;
    if (!(ls >> a)) continue;
    if (!(ls >> b >> c))
      throw std::invalid_argument("rod file line " + std::to_string(lineno) + ": expected 'v1 v2 z_end'");
    if (closed) throw std::invalid_argument("rod file line " + std::to_string(lineno) + ": rod after 'inf'");
    char* end = nullptr;
    RodStructure v;
    v.v1 = std::strtol(a.c_str(), &end, 10);
    if (*end) throw std::invalid_argument("rod file line " + std::to_string(lineno) + ": bad v1");
    v.v2 = std::strtol(b.c_str(), &end, 10);
    if (*end) throw std::invalid_argument("rod file line " + std::to_string(lineno) + ": bad v2");
    r.rods.push_back(v);
    if (c == "inf" || c == "+inf") {
      closed = true;
    } else {
      const double z = std::strtod(c.c_str(), &end);
      if (*end || !std::isfinite(z))
        throw std::invalid_argument("rod file line " + std::to_string(lineno) + ": bad z_end");
      r.turning_points.push_back(z);
    }
  }
  if (!closed) throw std::invalid_argument("rod file: last rod must end at 'inf'");
  return r;
}

RodDataSet read_rod_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rod file " + path);
  return read_rod_data(in);
}

void write_rod_data(std::ostream& out, const RodDataSet& r) {
  char buf[64];
  for (std::size_t i = 0; i < r.rods.size(); ++i) {
    out << r.rods[i].v1 << ' ' << r.rods[i].v2 << ' ';
    if (i < r.turning_points.size()) {
      std::snprintf(buf, sizeof buf, "%.17g", r.turning_points[i]);
      out << buf << '\n';
    } else {
      out << "inf\n";
    }
  }
}

}  // namespace iml
