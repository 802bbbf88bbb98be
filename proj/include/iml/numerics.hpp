#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace iml {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes and weights mapped to [a,b].
QuadRule gauss_legendre(std::size_t n, double a, double b);

// Composite Gauss-Legendre over the given breakpoints, n nodes per panel.
QuadRule composite_gauss(const std::vector<double>& breaks, std::size_t n);

double integrate(const QuadRule& q, const std::function<double(double)>& f);

// Neumaier compensated sum, fixed order.
class KahanSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Polynomial extrapolation to h -> 0 assuming
// f(h) = f0 + c1 h^{e_1} + c2 h^{e_2} + ... with exponents given.
// Needs samples.size() == exponents.size() + 1.
double richardson(const std::vector<double>& h, const std::vector<double>& f,
                  const std::vector<double>& exponents);

struct DecayFit {
  double limit = 0.0;
  double amplitude = 0.0;
  double exponent = 0.0;
  double residual = 0.0;
};

// Least-squares fit y = m + c r^{-k}, with k scanned then refined by Brent.
DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& y,
                   double kmin = 0.25, double kmax = 8.0);

// Worker count from IML_THREADS, defaulting to hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0,n); each i must write only its own slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace iml
