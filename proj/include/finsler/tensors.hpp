#pragma once

#include "finsler/kernel.hpp"

namespace finsler {

/// Metric pack at a line element. Lowered/raised variants are spelled out in
/// the field names; no generic index gymnastics happens behind the scenes.
template <class T>
struct MetricPack {
  Vec<T> y_low;   // y_i = g_ij y^j = (K^2/B)((b+gq) b_i + v_i)
  Vec<T> l_low;   // l_i = y_i / K
  Vec<T> l_up;    // l^i = y^i / K
  Mat<T> g_low;   // g_ij
  Mat<T> g_up;    // g^ij
  Mat<T> h_low;   // h_ij = g_ij - l_i l_j
  T det_identity{};  // det(g) = (K^2/B)^N det(a)
};

template <class T>
MetricPack<T> metric_pack(const LineElement<T>& le, const KernelScalars<T>& ks) {
  int n = le.dim;
  double g = ks.charge;
  const T& b = le.b;
  const T& q = le.q;
  const T& B = ks.B;
  T c = ks.K * ks.K / B;  // = J^2
  MetricPack<T> mp;
  mp.y_low = Vec<T>(n);
  mp.l_low = Vec<T>(n);
  mp.l_up = Vec<T>(n);
  for (int i = 0; i < n; ++i) {
    mp.y_low[i] = c * ((b + g * q) * le.bg.b_cov[i] + le.v_low[i]);
    mp.l_low[i] = mp.y_low[i] / ks.K;
    mp.l_up[i] = le.y[i] / ks.K;
  }
  mp.g_low = Mat<T>(n);
  mp.g_up = Mat<T>(n);
  mp.h_low = Mat<T>(n);
  T cb = q * (b + g * q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double bi = le.bg.b_cov[i], bj = le.bg.b_cov[j];
      mp.g_low(i, j) =
          c * (le.bg.a(i, j) +
               (g / B) * (cb * bi * bj + q * (bi * le.v_low[j] + bj * le.v_low[i]) -
                          (b / q) * le.v_low[i] * le.v_low[j]));
      const double bui = le.bg.b_up[i], buj = le.bg.b_up[j];
      mp.g_up(i, j) = (le.bg.a_inv(i, j) + ks.p * bui * buj +
                       ks.r * (bui * le.y[j] + le.y[i] * buj) + ks.t * le.y[i] * le.y[j]) /
                      c;
      mp.h_low(i, j) = mp.g_low(i, j) - mp.l_low[i] * mp.l_low[j];
    }
  double det_a = determinant(le.bg.a);
  T cn = c;
  for (int m = 1; m < n; ++m) cn = cn * c;
  mp.det_identity = cn * det_a;
  return mp;
}

/// Cartan family. For |g| < kChargeFloor the family vanishes identically and
/// the pack is returned zeroed with riemannian_branch set (the normalized
/// direction alpha is undefined there).
template <class T>
struct CartanPack {
  bool riemannian_branch = false;
  double norm = 0.0;     // ||A|| = (N/2)|g|
  double norm_sq = 0.0;  // A^k A_k = (N g / 2)^2
  Vec<T> A_low, A_up;
  Vec<T> alpha_low, alpha_up;  // A / ||A||
  Mat<T> H_low;   // H_ij = h_ij - alpha_i alpha_j
  Mat<T> H_mix;   // H^k_n = delta^k_n - l^k l_n - alpha^k alpha_n
  Ten3<T> A3;     // A_ijk, totally symmetric
  Mat<T> dA_low_dy;   // dA_k/dy^n: (k, n)
  Mat<T> dA_up_dy;    // dA^k/dy^n: (k, n)
  Ten3<T> dH_mix_dy;  // dH^k_n/dy^m: (k, n, m)
  Ten4<T> dA3_dy;     // dA_ijk/dy^n: (i, j, k, n)
  Mat<T> A2;          // A_ij = K dA_i/dy^j + l_i A_j
  Mat<T> tau2;        // tau_ij = -(N/4) g(2b+gq)/q H_ij
  Ten4<T> tau4;       // -(g(2b+gq)/(4q)) [H_jk H_in + H_ik H_jn + H_ji H_kn]
  Ten4<T> Rhat_low;   // K^2 Rhat_ijmn = (A^kA_k/N^2)(h_in h_mj - h_im h_nj), all indices low
  Mat<T> ricci_ind;   // Rhat_i{}^j{}_{mj} contracted
  T scalar_ind{};
};

template <class T>
CartanPack<T> cartan_pack(const LineElement<T>& le, const KernelScalars<T>& ks,
                          const MetricPack<T>& mp) {
  int n = le.dim;
  double g = ks.charge;
  CartanPack<T> cp;
  cp.A_low = Vec<T>(n);
  cp.A_up = Vec<T>(n);
  cp.alpha_low = Vec<T>(n);
  cp.alpha_up = Vec<T>(n);
  cp.H_low = Mat<T>(n);
  cp.H_mix = Mat<T>(n);
  cp.A3 = Ten3<T>(n);
  cp.dA_low_dy = Mat<T>(n);
  cp.dA_up_dy = Mat<T>(n);
  cp.dH_mix_dy = Ten3<T>(n);
  cp.dA3_dy = Ten4<T>(n);
  cp.A2 = Mat<T>(n);
  cp.tau2 = Mat<T>(n);
  cp.tau4 = Ten4<T>(n);
  cp.Rhat_low = Ten4<T>(n);
  cp.ricci_ind = Mat<T>(n);
  if (std::fabs(g) < kChargeFloor) {
    cp.riemannian_branch = true;
    return cp;
  }
  cp.norm = 0.5 * n * std::fabs(g);
  cp.norm_sq = 0.25 * n * n * g * g;

  const T& b = le.b;
  const T& q = le.q;
  const T& B = ks.B;
  const T& K = ks.K;
  T cl = 0.5 * n * K * g / (q * B);
  T cu = 0.5 * n * g / (K * q);
  for (int i = 0; i < n; ++i) {
    cp.A_low[i] = cl * ks.c_dir[i];
    cp.A_up[i] = cu * (B * le.bg.b_up[i] - (b + g * q) * le.y[i]);
    cp.alpha_low[i] = cp.A_low[i] / cp.norm;
    cp.alpha_up[i] = cp.A_up[i] / cp.norm;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cp.H_low(i, j) = mp.h_low(i, j) - cp.alpha_low[i] * cp.alpha_low[j];
      cp.H_mix(i, j) = (i == j ? T(1.0) : T(0.0)) - mp.l_up[i] * mp.l_low[j] -
                       cp.alpha_up[i] * cp.alpha_low[j];
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        cp.A3(i, j, k) =
            (mp.h_low(j, k) * cp.A_low[i] + mp.h_low(i, k) * cp.A_low[j] +
             mp.h_low(i, j) * cp.A_low[k] -
             cp.A_low[i] * cp.A_low[j] * cp.A_low[k] / cp.norm_sq) /
            double(n);

  T c_low = 0.5 * n * g * b / (K * q);            // (N g / (2 K w)) with 1/w = b/q
  T c_up = 0.5 * n * g * (b + g * q) / (K * q);   // (N g (1+gw) / (2 K w))
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) {
      cp.dA_low_dy(k, m) = -(1.0 / K) * cp.A_low[m] * mp.l_low[k] - c_low * cp.H_low(k, m) +
                           (2.0 / (n * K)) * cp.A_low[k] * cp.A_low[m];
      cp.dA_up_dy(k, m) = -(1.0 / K) * cp.A_low[m] * mp.l_up[k] - c_up * cp.H_mix(k, m) -
                          (2.0 / (n * K)) * cp.A_up[k] * cp.A_low[m];
      cp.A2(k, m) = K * cp.dA_low_dy(k, m) + mp.l_low[k] * cp.A_low[m];
    }
  T e_low = 2.0 * b / (n * g * q);
  T e_up = 2.0 * (b + g * q) / (n * g * q);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m)
      for (int p = 0; p < n; ++p)
        cp.dH_mix_dy(k, m, p) =
            (-cp.H_mix(k, p) * mp.l_low[m] - mp.l_up[k] * cp.H_low(m, p) +
             e_low * cp.H_low(m, p) * cp.A_up[k] + e_up * cp.H_mix(k, p) * cp.A_low[m]) /
            K;

  T c3 = 0.5 * g * b / (K * q);  // g/(2 K w)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          T t1 = (2.0 / n) * (cp.A3(j, k, m) * cp.A_low[i] + cp.A3(i, k, m) * cp.A_low[j] +
                              cp.A3(i, j, m) * cp.A_low[k]);
          T t2 = mp.l_low[j] * cp.A3(k, m, i) + mp.l_low[i] * cp.A3(k, m, j) +
                 mp.l_low[k] * cp.A3(i, j, m);
          T hh = cp.H_low(j, k) * cp.A_low[i] * cp.A_low[m] +
                 cp.H_low(i, k) * cp.A_low[j] * cp.A_low[m] +
                 cp.H_low(i, j) * cp.A_low[k] * cp.A_low[m];
          T hhh = cp.H_low(j, k) * cp.H_low(i, m) + cp.H_low(i, k) * cp.H_low(j, m) +
                  cp.H_low(j, i) * cp.H_low(k, m);
          cp.dA3_dy(i, j, k, m) =
              (t1 - t2 + (2.0 / double(n * n)) * hh) / K - c3 * hhh;
        }

  T tcoef = -(0.25 * n) * g * (2.0 * b + g * q) / q;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cp.tau2(i, j) = tcoef * cp.H_low(i, j);
  T t4coef = -(g * (2.0 * b + g * q)) / (4.0 * q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m)
          cp.tau4(i, j, k, m) =
              t4coef * (cp.H_low(j, k) * cp.H_low(i, m) + cp.H_low(i, k) * cp.H_low(j, m) +
                        cp.H_low(j, i) * cp.H_low(k, m));

  T rc = cp.norm_sq / (double(n * n) * K * K);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p)
          cp.Rhat_low(i, j, m, p) =
              rc * (mp.h_low(i, p) * mp.h_low(m, j) - mp.h_low(i, m) * mp.h_low(p, j));
  T ric = (2.0 / n - 1.0) * (cp.norm_sq / n) / (K * K);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) cp.ricci_ind(i, m) = ric * mp.h_low(i, m);
  cp.scalar_ind = ric * double(n - 1);
  return cp;
}

/// Charge derivatives of the metric-level tensors, in g-safe form (the printed
/// 1/g factors are absorbed into c_dir).
template <class T>
struct GDerivTensors {
  Vec<T> dy_dg;    // M y_i + (q K^2 / B^2) c_dir_i
  Mat<T> dgij_dg;  // M g_ij + (qK/B^2)(c_i l_j + l_i c_j) - (bq/B) H_ij - (2bK^2/(qB^3)) c_i c_j
};

template <class T>
GDerivTensors<T> g_derivative_tensors(const LineElement<T>& le, const KernelScalars<T>& ks,
                                      const MetricPack<T>& mp, const CartanPack<T>& cp) {
  int n = le.dim;
  const T& b = le.b;
  const T& q = le.q;
  const T& B = ks.B;
  const T& K = ks.K;
  GDerivTensors<T> d;
  d.dy_dg = Vec<T>(n);
  d.dgij_dg = Mat<T>(n);
  T cy = q * K * K / (B * B);
  for (int i = 0; i < n; ++i) d.dy_dg[i] = ks.M * mp.y_low[i] + cy * ks.c_dir[i];
  T c1 = q * K / (B * B);
  T c2 = b * q / B;
  T c3 = 2.0 * b * K * K / (q * B * B * B);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d.dgij_dg(i, j) = ks.M * mp.g_low(i, j) +
                        c1 * (ks.c_dir[i] * mp.l_low[j] + mp.l_low[i] * ks.c_dir[j]) -
                        c2 * cp.H_low(i, j) - c3 * ks.c_dir[i] * ks.c_dir[j];
  return d;
}

}  // namespace finsler
