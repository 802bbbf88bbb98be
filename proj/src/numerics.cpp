#include "iml/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_min.h>

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace iml {

namespace {

const QuadRule& reference_rule(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
  if (!t) throw std::runtime_error("gauss_legendre: table allocation failed");
  QuadRule q;
  q.x.resize(n);
  q.w.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, i, &q.x[i], &q.w[i], t);
  gsl_integration_glfixed_table_free(t);
  return cache.emplace(n, std::move(q)).first->second;
}

}  // namespace

QuadRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  const QuadRule& ref = reference_rule(n);
  QuadRule q;
  q.x.resize(n);
  q.w.resize(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  for (std::size_t i = 0; i < n; ++i) {
    q.x[i] = m + h * ref.x[i];
    q.w[i] = h * ref.w[i];
  }
  return q;
}

QuadRule composite_gauss(const std::vector<double>& breaks, std::size_t n) {
  QuadRule out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (!(breaks[k + 1] > breaks[k])) continue;
    QuadRule p = gauss_legendre(n, breaks[k], breaks[k + 1]);
    out.x.insert(out.x.end(), p.x.begin(), p.x.end());
    out.w.insert(out.w.end(), p.w.begin(), p.w.end());
  }
  return out;
}

double integrate(const QuadRule& q, const std::function<double(double)>& f) {
  KahanSum s;
  for (std::size_t i = 0; i < q.x.size(); ++i) s.add(q.w[i] * f(q.x[i]));
  return s.value();
}

void KahanSum::add(double v) {
  const double t = sum_ + v;
  if (std::fabs(sum_) >= std::fabs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

double richardson(const std::vector<double>& h, const std::vector<double>& f,
                  const std::vector<double>& exponents) {
  const std::size_t n = h.size();
  if (f.size() != n || exponents.size() + 1 != n)
    throw std::invalid_argument("richardson: need one more sample than exponents");
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b(n);
  const double scale = *std::max_element(h.begin(), h.end());
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    for (std::size_t k = 0; k < exponents.size(); ++k)
      A(i, k + 1) = std::pow(h[i] / scale, exponents[k]);
    b(i) = f[i];
  }
  return A.colPivHouseholderQr().solve(b)(0);
}

namespace {

struct FitData {
  const std::vector<double>* r;
  const std::vector<double>* y;
  double rref;
};

DecayFit linear_fit(const FitData& d, double k) {
  const std::size_t n = d.r->size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::pow((*d.r)[i] / d.rref, -k);
    b(i) = (*d.y)[i];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  DecayFit f;
  f.limit = c(0);
  f.amplitude = c(1) * std::pow(d.rref, k);
  f.exponent = k;
  f.residual = (A * c - b).norm();
  return f;
}

double fit_objective(double k, void* p) {
  return linear_fit(*static_cast<FitData*>(p), k).residual;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& y,
                   double kmin, double kmax) {
  if (r.size() < 3 || r.size() != y.size())
    throw std::invalid_argument("fit_decay: need at least 3 samples");
  FitData d{&r, &y, r.front()};
  const int scan = 64;
  int best = 0;
  double bestv = std::numeric_limits<double>::infinity();
  std::vector<double> ks(scan + 1);
  for (int i = 0; i <= scan; ++i) {
    ks[i] = kmin + (kmax - kmin) * i / scan;
    const double v = fit_objective(ks[i], &d);
    if (v < bestv) {
      bestv = v;
      best = i;
    }
  }
  if (best == 0 || best == scan) return linear_fit(d, ks[best]);

  gsl_error_handler_t* old = gsl_set_error_handler_off();
  gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
  gsl_function F;
  F.function = &fit_objective;
  F.params = &d;
  double kbest = ks[best];
  if (gsl_min_fminimizer_set(s, &F, ks[best], ks[best - 1], ks[best + 1]) == GSL_SUCCESS) {
    for (int it = 0; it < 100; ++it) {
      if (gsl_min_fminimizer_iterate(s) != GSL_SUCCESS) break;
      const double lo = gsl_min_fminimizer_x_lower(s);
      const double hi = gsl_min_fminimizer_x_upper(s);
      kbest = gsl_min_fminimizer_x_minimum(s);
      if (gsl_min_test_interval(lo, hi, 1e-12, 1e-10) == GSL_SUCCESS) break;
    }
  }
  gsl_min_fminimizer_free(s);
  gsl_set_error_handler(old);
  return linear_fit(d, kbest);
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IML_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned nw = std::min<std::size_t>(worker_count(), n);
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex emu;
  for (unsigned t = 0; t < nw; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(emu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace iml
