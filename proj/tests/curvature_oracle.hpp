#pragma once

// Brute-force scalar curvature of the full 4-metric assembled from Brill
// data, via Christoffel symbols and 4th-order differences of g.

#include <Eigen/Dense>
#include <array>

#include "iml/geometry.hpp"

namespace oracle {

using Mat4 = Eigen::Matrix4d;

inline Mat4 full_metric(const iml::BrillSample& b) {
  Mat4 g = Mat4::Zero();
  const double e2a = std::exp(2 * b.alpha);
  const Eigen::Matrix2d& G = b.G;
  const Eigen::Matrix2d& A = b.A;  // A(i, a)
  const Eigen::Matrix2d GA = G * A;  // (G A)(j, a) = G_ji A^i_a
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) g(a, c) = (a == c ? e2a : 0.0) + A.col(a).dot(GA.col(c));
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i) g(a, 2 + i) = g(2 + i, a) = GA(i, a);
  g.block<2, 2>(2, 2) = G;
  return g;
}

inline double scalar_curvature(const iml::BrillSampler& s, double rho, double z, double h) {
  auto g_at = [&](double dr, double dz) { return full_metric(s(rho + dr, z + dz)); };
  const double w1[5] = {1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12};
  const double w2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  std::array<Mat4, 2> dg;
  std::array<std::array<Mat4, 2>, 2> ddg;
  for (int k = 0; k < 2; ++k) {
    dg[k].setZero();
    ddg[k][k].setZero();
  }
  for (int m = 0; m < 5; ++m) {
    const double o = (m - 2) * h;
    const Mat4 gr = g_at(o, 0), gz = g_at(0, o);
    dg[0] += w1[m] / h * gr;
    dg[1] += w1[m] / h * gz;
    ddg[0][0] += w2[m] / (h * h) * gr;
    ddg[1][1] += w2[m] / (h * h) * gz;
  }
  Mat4 mixed = Mat4::Zero();
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 5; ++n) {
      if (w1[m] == 0 || w1[n] == 0) continue;
      mixed += w1[m] * w1[n] / (h * h) * g_at((m - 2) * h, (n - 2) * h);
    }
  ddg[0][1] = ddg[1][0] = mixed;

  const Mat4 g = g_at(0, 0);
  const Mat4 gi = g.inverse();
  auto D = [&](int k, int a, int b) { return k < 2 ? dg[k](a, b) : 0.0; };
  auto DD = [&](int k, int l, int a, int b) { return (k < 2 && l < 2) ? ddg[k][l](a, b) : 0.0; };

  // Gamma_{s mu nu} (lowered) and its derivatives.
  double Gl[4][4][4], dGl[2][4][4][4];
  for (int sgm = 0; sgm < 4; ++sgm)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        Gl[sgm][mu][nu] = 0.5 * (D(mu, sgm, nu) + D(nu, sgm, mu) - D(sgm, mu, nu));
        for (int k = 0; k < 2; ++k)
          dGl[k][sgm][mu][nu] = 0.5 * (DD(k, mu, sgm, nu) + DD(k, nu, sgm, mu) - DD(k, sgm, mu, nu));
      }
  std::array<Mat4, 2> dgi;
  for (int k = 0; k < 2; ++k) dgi[k] = -gi * dg[k] * gi;

  double Gam[4][4][4], dGam[2][4][4][4];
  for (int l = 0; l < 4; ++l)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        double v = 0, d0 = 0, d1 = 0;
        for (int sgm = 0; sgm < 4; ++sgm) {
          v += gi(l, sgm) * Gl[sgm][mu][nu];
          d0 += dgi[0](l, sgm) * Gl[sgm][mu][nu] + gi(l, sgm) * dGl[0][sgm][mu][nu];
          d1 += dgi[1](l, sgm) * Gl[sgm][mu][nu] + gi(l, sgm) * dGl[1][sgm][mu][nu];
        }
        Gam[l][mu][nu] = v;
        dGam[0][l][mu][nu] = d0;
        dGam[1][l][mu][nu] = d1;
      }
  double R = 0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      double ric = 0;
      for (int l = 0; l < 4; ++l) {
        if (l < 2) ric += dGam[l][l][mu][nu];
        if (nu < 2) ric -= dGam[nu][l][mu][l];
        for (int sgm = 0; sgm < 4; ++sgm)
          ric += Gam[l][l][sgm] * Gam[sgm][mu][nu] - Gam[l][nu][sgm] * Gam[sgm][mu][l];
      }
      R += gi(mu, nu) * ric;
    }
  return R;
}

}  // namespace oracle
