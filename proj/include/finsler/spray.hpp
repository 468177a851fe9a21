#pragma once

#include "finsler/tensors.hpp"

namespace finsler {

/// Spray contribution created by the gradient of the charge:
///   E^k = M (yg) y^k + (q (yg)/B)(B b^k - (b+gq) y^k) - (M/2) K^2 g_h g^{kh},
/// with K^2 g^{kh} g_h expanded through the closed inverse metric. Vanishes
/// identically when the charge is constant.
template <class T>
Vec<T> charge_spray(const PointFrame& fr, const LineElement<T>& le,
                    const KernelScalars<T>& ks) {
  int n = le.dim;
  const T& b = le.b;
  const T& q = le.q;
  const T& B = ks.B;
  double g = ks.charge;
  T yg{};
  double bg_scal = dot(fr.bg.b_up, fr.g_grad);
  for (int i = 0; i < n; ++i) yg += le.y[i] * fr.g_grad[i];

  Vec<T> E(n);
  T cmid = q * yg / B;
  for (int k = 0; k < n; ++k) {
    // B [ g^k + (g b/q)(bg) b^k - (g/q)((yg) b^k + (bg) y^k) + g(b+gq)/(qB) (yg) y^k ]
    double gk = 0.0;
    for (int j = 0; j < n; ++j) gk += fr.bg.a_inv(k, j) * fr.g_grad[j];
    T K2gg = B * (gk + (g * b / q) * bg_scal * fr.bg.b_up[k] -
                  (g / q) * (yg * fr.bg.b_up[k] + bg_scal * le.y[k]) +
                  (g * (b + g * q) / (q * B)) * yg * le.y[k]);
    E[k] = ks.M * yg * le.y[k] + cmid * (B * fr.bg.b_up[k] - (b + g * q) * le.y[k]) -
           0.5 * ks.M * K2gg;
  }
  return E;
}

template <class T>
Vec<T> charge_spray(const PointFrame& fr, const Vec<T>& y) {
  LineElement<T> le = line_element(fr.bg, fr.x, y);
  KernelScalars<T> ks = kernel_scalars(le);
  return charge_spray(fr, le, ks);
}

/// Full spray coefficients G^k (geodesics solve x'' + G(x, x') = 0):
/// the axis-torsion terms, the expansion term, the Riemannian quadratic, and
/// the charge-gradient part.
template <class T>
Vec<T> spray(const PointFrame& fr, const Vec<T>& y) {
  int n = fr.bg.dim;
  LineElement<T> le = line_element(fr.bg, fr.x, y);
  KernelScalars<T> ks = kernel_scalars(le);
  double g = ks.charge;

  Vec<T> s(n), t(n);  // s_k = y^m nabla_k b_m ; t_j = y^h nabla_h b_j
  for (int k = 0; k < n; ++k) {
    T sv{}, tv{};
    for (int m = 0; m < n; ++m) {
      sv += y[m] * fr.nabla_b(k, m);
      tv += y[m] * fr.nabla_b(m, k);
    }
    s[k] = sv;
    t[k] = tv;
  }
  T ys{};
  for (int k = 0; k < n; ++k) ys += y[k] * s[k];
  Vec<T> curl(n);
  for (int j = 0; j < n; ++j) curl[j] = t[j] - s[j];
  T bcurl{};
  for (int j = 0; j < n; ++j) bcurl += fr.bg.b_up[j] * curl[j];

  Vec<T> E = charge_spray(fr, le, ks);
  Vec<T> G(n);
  for (int k = 0; k < n; ++k) {
    T ac{};
    for (int j = 0; j < n; ++j) ac += fr.bg.a_inv(k, j) * curl[j];
    T quad{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) quad += fr.christoffels(k, i, j) * y[i] * y[j];
    G[k] = g * le.q * ac - (g * g) * bcurl * le.v_up[k] + (g / le.q) * ys * le.v_up[k] +
           quad + E[k];
  }
  return G;
}

/// Spray derivative family, all y-derivatives exact (nested duals):
/// G_y(i,k) = dG^i/dy^k, G_yy(i,k,m), G_yyy(i,k,m,p).
struct SprayJet {
  Vec<double> G;
  Mat<double> G_y;
  Ten3<double> G_yy;
  Ten4<double> G_yyy;
  int order = 1;
};

inline SprayJet spray_jet(const PointFrame& fr, const Vec<double>& y, int order = 2) {
  int n = fr.bg.dim;
  SprayJet jet;
  jet.order = order;
  jet.G = spray(fr, y);
  jet.G_y = Mat<double>(n);
  if (order >= 2) jet.G_yy = Ten3<double>(n);
  if (order >= 3) jet.G_yyy = Ten4<double>(n);
  if (order == 1) {
    for (int k = 0; k < n; ++k) {
      auto d = spray(fr, detail::seed_dir(y, k));
      for (int i = 0; i < n; ++i) jet.G_y(i, k) = d[i].dot;
    }
    return jet;
  }
  if (order == 2) {
    for (int k = 0; k < n; ++k)
      for (int m = k; m < n; ++m) {
        auto d = spray(fr, detail::seed_dir(detail::seed_dir(Vec<double>(y), k), m));
        for (int i = 0; i < n; ++i) {
          jet.G_yy(i, k, m) = d[i].dot.dot;
          jet.G_yy(i, m, k) = d[i].dot.dot;
          if (m == k) jet.G_y(i, k) = d[i].dot.val;
        }
      }
    return jet;
  }
  // seeding order: k innermost, m middle, p outer
  for (int k = 0; k < n; ++k)
    for (int m = k; m < n; ++m)
      for (int p = m; p < n; ++p) {
        auto yd = detail::seed_dir(detail::seed_dir(detail::seed_dir(y, k), m), p);
        auto d = spray(fr, yd);
        for (int i = 0; i < n; ++i) {
          double v3 = d[i].dot.dot.dot;
          jet.G_yyy(i, k, m, p) = v3;
          jet.G_yyy(i, k, p, m) = v3;
          jet.G_yyy(i, m, k, p) = v3;
          jet.G_yyy(i, m, p, k) = v3;
          jet.G_yyy(i, p, k, m) = v3;
          jet.G_yyy(i, p, m, k) = v3;
          if (m == k && p == k) jet.G_y(i, k) = d[i].val.val.dot;
          if (p == m) {
            double v2 = d[i].val.dot.dot;  // d^2 G / dy^m dy^k
            jet.G_yy(i, k, m) = v2;
            jet.G_yy(i, m, k) = v2;
          }
        }
      }
  return jet;
}

/// Same derivative family for the charge-gradient part alone.
struct ChargeSprayJet {
  Vec<double> E;
  Mat<double> E_y;
  Ten3<double> E_yy;
};

inline ChargeSprayJet charge_spray_jet(const PointFrame& fr, const Vec<double>& y,
                                       int order = 2) {
  int n = fr.bg.dim;
  ChargeSprayJet jet;
  jet.E = charge_spray(fr, y);
  jet.E_y = Mat<double>(n);
  if (order >= 2) jet.E_yy = Ten3<double>(n);
  if (order == 1) {
    for (int k = 0; k < n; ++k) {
      auto d = charge_spray(fr, detail::seed_dir(y, k));
      for (int i = 0; i < n; ++i) jet.E_y(i, k) = d[i].dot;
    }
    return jet;
  }
  for (int k = 0; k < n; ++k)
    for (int m = k; m < n; ++m) {
      auto d = charge_spray(fr, detail::seed_dir(detail::seed_dir(Vec<double>(y), k), m));
      for (int i = 0; i < n; ++i) {
        jet.E_yy(i, k, m) = d[i].dot.dot;
        jet.E_yy(i, m, k) = d[i].dot.dot;
        if (m == k) jet.E_y(i, k) = d[i].dot.val;
      }
    }
  return jet;
}

/// Finslerian Christoffel symbols gamma^k_{ij} assembled from central x-differences
/// of the closed-form metric tensor (the verification route for the spray).
inline Ten3<double> finsler_christoffels(const BackgroundGeometry& geom, const Vec<double>& x,
                                         const Vec<double>& y) {
  int n = geom.dim;
  double h = geom.x_step;
  Ten3<double> dg(n);  // dg(i,j,k) = d g_ij / dx^k at fixed y
  for (int k = 0; k < n; ++k) {
    Vec<double> xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    auto lep = line_element(geom, xp, y);
    auto ksp = kernel_scalars(lep);
    auto gp = metric_pack(lep, ksp).g_low;
    auto lem = line_element(geom, xm, y);
    auto ksm = kernel_scalars(lem);
    auto gm = metric_pack(lem, ksm).g_low;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg(i, j, k) = (gp(i, j) - gm(i, j)) / (2.0 * h);
  }
  auto le = line_element(geom, x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  Ten3<double> gam(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
          s += mp.g_up(k, m) * (dg(m, i, j) + dg(m, j, i) - dg(j, i, m));
        gam(k, i, j) = 0.5 * s;
      }
  return gam;
}

}  // namespace finsler
