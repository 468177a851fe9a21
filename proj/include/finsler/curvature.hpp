#pragma once

#include <array>

#include "finsler/spray.hpp"

namespace finsler {

/// Frames at x and at x +- step e_j, shared by every finite-difference
/// x-derivative taken at one line element. Building it once per sample keeps
/// nested dual evaluations from re-deriving the background.
struct SprayStencil {
  const BackgroundGeometry* geom = nullptr;
  Vec<double> x;
  double step = 1e-5;
  PointFrame center;
  std::array<PointFrame, 2 * kMaxDim> offset;  // [2j] = +step e_j, [2j+1] = -step e_j

  const PointFrame& plus(int j) const { return offset[2 * j]; }
  const PointFrame& minus(int j) const { return offset[2 * j + 1]; }
};

inline SprayStencil make_spray_stencil(const BackgroundGeometry& geom, const Vec<double>& x,
                                       const FrameOptions& opts = {}) {
  SprayStencil st;
  st.geom = &geom;
  st.x = x;
  // The stencil differences quantities that already contain first-order FD
  // pieces (the frames' gradients), so it uses the wider second-level step:
  // with a shared step h the rounding noise grows like eps/h^2.
  st.step = geom.x2_step;
  st.center = build_point_frame(geom, x, opts);
  for (int j = 0; j < geom.dim; ++j) {
    Vec<double> xp = x, xm = x;
    xp[j] += st.step;
    xm[j] -= st.step;
    FrameOptions off = opts;
    off.with_riemann = false;
    st.offset[2 * j] = build_point_frame(geom, xp, off);
    st.offset[2 * j + 1] = build_point_frame(geom, xm, off);
  }
  return st;
}

/// hh-curvature numerator K^2 R^i_k =
///   dG^i/dx^k - (1/4) G^i_j G^j_k - (1/2) y^j d2G^i/(dx^j dy^k) + (1/2) G^j G^i_{kj}.
/// x-derivatives by central differences over the stencil, y-derivatives exact.
/// Both FD terms come from one evaluation grid, so R^i_k y^k = 0 holds to
/// rounding rather than to FD error.
template <class T>
Mat<T> hh_curvature(const SprayStencil& st, const Vec<T>& y) {
  int n = st.center.bg.dim;
  double h = st.step;
  Mat<T> out(n);

  // grid over (offset direction j, dual direction k)
  Mat<T> dGdx(n);        // (i,k): dG^i/dx^k
  Ten3<T> d2Gdxdy(n);    // (i,j,k): d2 G^i / dx^j dy^k
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      auto gp = spray(st.plus(j), detail::seed_dir(y, k));
      auto gm = spray(st.minus(j), detail::seed_dir(y, k));
      for (int i = 0; i < n; ++i) {
        d2Gdxdy(i, j, k) = (gp[i].dot - gm[i].dot) / (2.0 * h);
        if (k == 0)  // value parts are k-independent
          dGdx(i, j) = (gp[i].val - gm[i].val) / (2.0 * h);
      }
    }

  Mat<T> Gy(n);
  Ten3<T> Gyy(n);
  for (int k = 0; k < n; ++k)
    for (int m = k; m < n; ++m) {
      auto d = spray(st.center, detail::seed_dir(detail::seed_dir(y, k), m));
      for (int i = 0; i < n; ++i) {
        Gyy(i, k, m) = d[i].dot.dot;
        Gyy(i, m, k) = d[i].dot.dot;
        if (m == k) Gy(i, k) = d[i].dot.val;
      }
    }
  Vec<T> G(n);
  {
    auto g0 = spray(st.center, y);
    for (int i = 0; i < n; ++i) G[i] = g0[i];
  }

  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      T acc = dGdx(i, k);
      for (int j = 0; j < n; ++j) {
        acc -= 0.25 * Gy(i, j) * Gy(j, k);
        acc -= 0.5 * y[j] * d2Gdxdy(i, j, k);
        acc += 0.5 * G[j] * Gyy(i, k, j);
      }
      out(i, k) = acc;
    }
  return out;
}

/// R^i_{km} = (1/3K) [ d(K^2 R^i_k)/dy^m - d(K^2 R^i_m)/dy^k ].
template <class T>
Ten3<T> hh_curvature_km(const SprayStencil& st, const Vec<T>& y) {
  int n = st.center.bg.dim;
  Ten3<T> d(n);  // (i,k,m) = d(K^2 R^i_k)/dy^m
  for (int m = 0; m < n; ++m) {
    auto km = hh_curvature(st, detail::seed_dir(y, m));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) d(i, k, m) = km(i, k).dot;
  }
  T K = metric_function(st.center.bg, y);
  Ten3<T> out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) out(i, k, m) = (d(i, k, m) - d(i, m, k)) / (3.0 * K);
  return out;
}

/// Finslerian Christoffels at arbitrary scalar type, differencing the closed
/// metric over the stencil.
template <class T>
Ten3<T> finsler_christoffels_t(const SprayStencil& st, const Vec<T>& y) {
  int n = st.center.bg.dim;
  double h = st.step;
  Ten3<T> dg(n);
  for (int k = 0; k < n; ++k) {
    auto lep = line_element(st.plus(k).bg, st.plus(k).x, y);
    auto gp = metric_pack(lep, kernel_scalars(lep)).g_low;
    auto lem = line_element(st.minus(k).bg, st.minus(k).x, y);
    auto gm = metric_pack(lem, kernel_scalars(lem)).g_low;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg(i, j, k) = (gp(i, j) - gm(i, j)) / (2.0 * h);
  }
  auto le = line_element(st.center.bg, st.x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  Ten3<T> gam(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        T s{};
        for (int m = 0; m < n; ++m)
          s += mp.g_up(k, m) * (dg(m, i, j) + dg(m, j, i) - dg(j, i, m));
        gam(k, i, j) = 0.5 * s;
      }
  return gam;
}

/// h-connection of the space. Gbar is the nonlinear connection (1/2) dG^k/dy^j;
/// Gamma^k_{ij} = gamma^k_{ij} - Gbar^n_i C_n{}^k{}_j - Gbar^n_j C_n{}^k{}_i
///              + g^{ks} Gbar^n_s C_{nij},  C = A/K.
template <class T>
struct ConnectionT {
  Ten3<T> gammaF;  // (k,i,j)
  Mat<T> Gbar;     // (k,j)
  Ten3<T> Gamma;   // (k,i,j)
};

template <class T>
ConnectionT<T> connection_t(const SprayStencil& st, const Vec<T>& y) {
  int n = st.center.bg.dim;
  ConnectionT<T> c;
  c.gammaF = finsler_christoffels_t(st, y);
  c.Gbar = Mat<T>(n);
  for (int j = 0; j < n; ++j) {
    auto d = spray(st.center, detail::seed_dir(y, j));
    for (int k = 0; k < n; ++k) c.Gbar(k, j) = 0.5 * d[k].dot;
  }
  auto le = line_element(st.center.bg, st.x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  auto cp = cartan_pack(le, ks, mp);
  c.Gamma = Ten3<T>(n);
  if (cp.riemannian_branch) {
    c.Gamma = c.gammaF;
    return c;
  }
  // C_n{}^k{}_j = g^{ka} A_{naj} / K ; Gup(k,n) = g^{ks} Gbar^n_s
  Ten3<T> Cmix(n);
  for (int nn = 0; nn < n; ++nn)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        T s{};
        for (int a = 0; a < n; ++a) s += mp.g_up(k, a) * cp.A3(nn, a, j);
        Cmix(nn, k, j) = s / ks.K;
      }
  Mat<T> Gup(n);
  for (int k = 0; k < n; ++k)
    for (int nn = 0; nn < n; ++nn) {
      T s{};
      for (int m = 0; m < n; ++m) s += mp.g_up(k, m) * c.Gbar(nn, m);
      Gup(k, nn) = s;
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        T s = c.gammaF(k, i, j);
        for (int nn = 0; nn < n; ++nn) {
          s -= c.Gbar(nn, i) * Cmix(nn, k, j);
          s -= c.Gbar(nn, j) * Cmix(nn, k, i);
          s += Gup(k, nn) * cp.A3(nn, i, j) / ks.K;
        }
        c.Gamma(k, i, j) = s;
      }
  return c;
}

/// Dotted Cartan tensor Adot_{ijk} = A_{ijk|m} l^m at arbitrary scalar type
/// (needed with dual y inside the rank-4 curvature assembly).
template <class T>
Ten3<T> cartan_dot_t(const SprayStencil& st, const Vec<T>& y) {
  int n = st.center.bg.dim;
  double h = st.step;
  auto conn = connection_t(st, y);
  auto le = line_element(st.center.bg, st.x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  auto cp = cartan_pack(le, ks, mp);
  Ten4<T> dA3dx(n);  // (i,j,k,l) = d A_ijk / dx^l
  for (int l = 0; l < n; ++l) {
    auto lep = line_element(st.plus(l).bg, st.plus(l).x, y);
    auto ksp = kernel_scalars(lep);
    auto cpp = cartan_pack(lep, ksp, metric_pack(lep, ksp));
    auto lem = line_element(st.minus(l).bg, st.minus(l).x, y);
    auto ksm = kernel_scalars(lem);
    auto cpm = cartan_pack(lem, ksm, metric_pack(lem, ksm));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          dA3dx(i, j, k, l) = (cpp.A3(i, j, k) - cpm.A3(i, j, k)) / (2.0 * h);
  }
  Ten3<T> dot(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        T s{};
        for (int l = 0; l < n; ++l) {
          T cov = dA3dx(i, j, k, l);
          for (int m = 0; m < n; ++m) {
            cov -= cp.dA3_dy(i, j, k, m) * conn.Gbar(m, l);
            cov -= conn.Gamma(m, i, l) * cp.A3(m, j, k);
            cov -= conn.Gamma(m, j, l) * cp.A3(i, m, k);
            cov -= conn.Gamma(m, k, l) * cp.A3(i, j, m);
          }
          s += cov * mp.l_up[l];
        }
        dot(i, j, k) = s;
      }
  return dot;
}

// ---------------- double-level assemblies (implemented in curvature.cpp) ----

/// Covariant derivatives and dotted tensors at one line element.
struct CovariantPack {
  Mat<double> A_cov;       // A_{i|j}
  Ten4<double> A3_cov;     // A_{ijk|l}
  Mat<double> alpha_cov;   // alpha_{i|j}
  Ten3<double> g_cov;      // g_{jk|l} (compatibility check; ~0)
  Vec<double> K_cov;       // K_{|j} (~0)
  Vec<double> A_dot;
  Ten3<double> A3_dot;
  Vec<double> alpha_dot;
  Ten3<double> alpha3_dot;
  Mat<double> H_dot;
  Mat<double> A_cov_alt;   // A_{i|j} through the tau-form of the derivative
};

CovariantPack covariant_pack(const SprayStencil& st, const Vec<double>& y);

/// hv-curvature P_{jikl} (definitional assembly from covariant derivatives)
/// and its skew part (1/2)(P_jikl - P_ijkl).
struct HvCurvature {
  Ten4<double> P;
  Ten4<double> P_skew;
};

HvCurvature hv_curvature(const MetricPack<double>& mp, const CartanPack<double>& cp,
                         const CovariantPack& cov);

/// A-special diagnostics: gamma_k from the definitional route, least-squares
/// eta against the H-tensor, and the residual of A_{i|k} - gamma_k A_i - eta H_ik.
struct ASpecialDiagnostics {
  Vec<double> gamma_k;
  double gamma = 0.0;
  double eta = 0.0;
  bool eta_fitted = false;  // false at N = 2 (H has rank 0 there)
  double residual = 0.0;    // sup-norm, relative to sup|A_{i|k}| when that is > 0
};

ASpecialDiagnostics a_special_diagnostics(const SprayStencil& st, const Vec<double>& y,
                                          const MetricPack<double>& mp,
                                          const CartanPack<double>& cp,
                                          const CovariantPack& cov);

/// Rank-4 hh-curvature R_n{}^i{}_{km} (second-order FD; diagnostic accuracy).
Ten4<double> hh_curvature_rank4(const SprayStencil& st, const Vec<double>& y);

/// rho_ij = (1/2)(R_i{}^m{}_{mj} + R^m{}_{ijm}) - (1/2) g_ij R^{mn}{}_{nm}.
Mat<double> rho_tensor(const Ten4<double>& rank4, const MetricPack<double>& mp);

/// Conservation-current routes. "factor" is the common tensor
/// (h^l_u h^m_k - h^l_k h^m_u)(-R^u_{lj} d^k_m + (1/2) R^u_{lm} d^k_j).
struct CurrentRoutes {
  Vec<double> factor;
  Vec<double> J_from_gamma;      // (1/4) g^2 gamma * factor
  Vec<double> J_involutive;      // (1/(4K)) mu g b * factor
  Vec<double> J_from_P;          // -P^{[lm]}_{mu} R^u_{lj} + (1/2) P^{[lm]}_{ju} R^u_{lm}
};

CurrentRoutes current_routes(const LineElement<double>& le, const KernelScalars<double>& ks,
                             const MetricPack<double>& mp, const Ten3<double>& rkm,
                             const Ten4<double>& p_skew, double gamma, double mu);

// ---------------- involutive closed forms (flat, b-parallel) ----------------

/// K A_{i|j} closed form. corrected=true uses the B/q bracket (exact);
/// corrected=false reproduces the printed bracket (B/q + gb/2 on the M term).
Mat<double> involutive_hcov_closed(const PointFrame& fr, const LineElement<double>& le,
                                   const KernelScalars<double>& ks,
                                   const MetricPack<double>& mp,
                                   const CartanPack<double>& cp, bool corrected);

/// eta scalar of the A-special relation implied by the closed form above.
double involutive_eta_closed(const LineElement<double>& le, const KernelScalars<double>& ks,
                             double mu);

/// Closed charge-spray derivative E^k_n in the involutive case.
Mat<double> involutive_charge_spray_dy_closed(const PointFrame& fr,
                                              const LineElement<double>& le,
                                              const KernelScalars<double>& ks,
                                              const MetricPack<double>& mp,
                                              const CartanPack<double>& cp);

/// Closed contractions of E and E^k_n (involutive case): A_k E^k, A_k E^k_n,
/// E^k_n A^n, H_km E^k_n, E^k_n H^n_i, plus the Gamma-combination contraction.
struct InvolutiveContractions {
  double AE;                 // A_k E^k
  Vec<double> AEn;           // A_k E^k_n
  Vec<double> EnA;           // E^k_n A^n
  Mat<double> HE;            // H_km E^k_n -> (m,n)
  Mat<double> EH;            // E^k_n H^n_i -> (k,i)
  Ten3<double> gamma_comb;   // -E^n_i A_n{}^k{}_j + E^{kn} A_{nij} -> (k,i,j)
  Mat<double> gamma_comb_A;  // its contraction with A_k -> (i,j)
};

InvolutiveContractions involutive_contractions_closed(const LineElement<double>& le,
                                                      const KernelScalars<double>& ks,
                                                      const MetricPack<double>& mp,
                                                      const CartanPack<double>& cp,
                                                      const Vec<double>& g_grad);

/// Quadratic charge-spray block -E^k_n E^n_m + 2 E^n E^k_{nm}.
/// corrected=true: (yg)^2 [ -(4 w^2 Mhat/(N g)) l^k A_m + C_H H^k_m ] with
/// C_H = (1/4)(M + Mhat(1+gw))^2 - M Mhat tau (derived here; machine-checked).
/// corrected=false: the printed block.
Mat<double> involutive_quadratic_block_closed(const LineElement<double>& le,
                                              const KernelScalars<double>& ks,
                                              const MetricPack<double>& mp,
                                              const CartanPack<double>& cp, double yg,
                                              bool corrected);

/// S^i_k of the involutive curvature (closed form, exact as printed).
Mat<double> involutive_sik_closed(const LineElement<double>& le,
                                  const KernelScalars<double>& ks,
                                  const MetricPack<double>& mp,
                                  const CartanPack<double>& cp, bool c29_variant);

/// Involutive curvature numerator K^2 R^i_k assembled from the closed pieces.
/// corrected selects the repaired S-bracket and quadratic block; mu_grad is
/// the gradient of the involution scalar (zero when mu is constant).
Mat<double> involutive_curvature_closed(const PointFrame& fr, const LineElement<double>& le,
                                        const KernelScalars<double>& ks,
                                        const MetricPack<double>& mp,
                                        const CartanPack<double>& cp,
                                        const Mat<double>& E_y, const Vec<double>& E,
                                        const Vec<double>& mu_grad, double mu,
                                        bool corrected);

}  // namespace finsler
