#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iml {

struct RodStructure {
  long v1 = 1;
  long v2 = 0;
  bool operator==(const RodStructure&) const = default;
};

// Rod n covers [z_{n-1}, z_n]; the first and last rods are semi-infinite,
// so rods.size() == turning_points.size() + 1.
struct RodDataSet {
  std::vector<double> turning_points;
  std::vector<RodStructure> rods;
  bool operator==(const RodDataSet&) const = default;
};

enum class AsymptoticKind { ALE, ALF, AF };

struct AsymptoticClass {
  AsymptoticKind kind = AsymptoticKind::AF;
  long p = 1, q = 0;   // ALE(p,q)
  long k = 1;          // ALF(k, ell)
  double ell = 1.0;    // ALF/AF
  double beta = 0.0;   // AF twist
  double kappa = 1.0;  // decay rate
  bool h_modified = false;  // ALF with h(r) = 1 + k ell / (2r)

  static AsymptoticClass ale(long p, long q, double kappa = 4.0);
  static AsymptoticClass alf(long k, double ell, bool h_modified = false, double kappa = 1.0);
  static AsymptoticClass af(double beta, double ell, double kappa = 1.0);
  std::string tag() const;
};

struct CrossSection {
  bool s1xs2 = false;  // S^1 x S^2 when true, otherwise L(p,q)
  long p = 0, q = 0;
  std::string str() const;
};

enum class ViolationKind { Coprimality, ZeroVector, Ordering, Admissibility, Distinctness, Count };

struct Violation {
  int index = 0;  // rod index, or turning point index for ordering
  ViolationKind kind = ViolationKind::Coprimality;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

bool valid_rod_structure(const RodStructure& r);
long rod_det(const RodStructure& a, const RodStructure& b);
bool corner_admissible(const RodStructure& a, const RodStructure& b);
ValidationReport validate_rod_data(const RodDataSet& r);

// Throws std::invalid_argument when the semi-infinite rods cannot be normalized.
CrossSection asymptotic_topology(const RodDataSet& r);

// Text format: one "v1 v2 z_end" line per rod, "inf" on the last; '#' comments.
RodDataSet read_rod_data(std::istream& in);
RodDataSet read_rod_file(const std::string& path);
void write_rod_data(std::ostream& out, const RodDataSet& r);

}  // namespace iml
