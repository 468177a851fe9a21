#pragma once

#include <stdexcept>

#include "finsler/background.hpp"
#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

/// Rays with q < kQFloor * S are excluded: the metric function itself is
/// finite there but the Cartan family carries 1/q factors.
inline constexpr double kQFloor = 1e-8;
/// |g| below this takes the Riemannian branch in the Cartan-family code.
inline constexpr double kChargeFloor = 1e-6;

template <class T>
Vec<T> to_vec(const Vec<double>& v) {
  Vec<T> r(v.size());
  for (int i = 0; i < v.size(); ++i) r[i] = T(v[i]);
  return r;
}

/// A base point, a tangent vector, and the algebraic variables they induce.
/// Scalar type T may be a nested Dual seeded in y for exact y-derivatives.
/// w and lambda are the only fields that blow up as b -> 0 (they are reported
/// as IEEE infinities there); every downstream formula uses b-safe forms.
template <class T>
struct LineElement {
  int dim = 0;
  Vec<double> x;
  Vec<T> y;
  BackgroundAt bg;

  Vec<T> u;      // u_i = a_ij y^j
  Vec<T> v_low;  // v_i = u_i - b b_i
  Vec<T> v_up;   // v^i = y^i - b b^i
  Vec<T> z;      // z_i = b v_i - q^2 b_i
  Vec<T> e;      // e_i = (b/q^2) v_i - b_i
  Mat<T> eta;    // eta_ij = a_ij - b_i b_j - v_i v_j / q^2
  T b{}, S{}, q{}, w{}, lambda{};
};

template <class T>
LineElement<T> line_element(const BackgroundAt& bg, const Vec<double>& x, const Vec<T>& y,
                            double q_floor = kQFloor) {
  int n = bg.dim;
  LineElement<T> le;
  le.dim = n;
  le.x = x;
  le.y = y;
  le.bg = bg;

  le.u = Vec<T>(n);
  for (int i = 0; i < n; ++i) {
    T s{};
    for (int j = 0; j < n; ++j) s += bg.a(i, j) * y[j];
    le.u[i] = s;
  }
  T s2{};
  for (int i = 0; i < n; ++i) s2 += le.u[i] * y[i];
  if (!(value(s2) > 0.0)) throw std::invalid_argument("zero tangent vector");
  le.S = sqrt(s2);
  T bv{};
  for (int i = 0; i < n; ++i) bv += bg.b_cov[i] * y[i];
  le.b = bv;
  T q2 = s2 - bv * bv;
  if (!(value(q2) > q_floor * q_floor * value(s2)))
    throw std::invalid_argument("line element too close to the axis ray (q ~ 0)");
  le.q = sqrt(q2);
  le.w = le.q / le.b;
  le.lambda = le.w * le.w;

  le.v_low = Vec<T>(n);
  le.v_up = Vec<T>(n);
  le.z = Vec<T>(n);
  le.e = Vec<T>(n);
  for (int i = 0; i < n; ++i) {
    le.v_low[i] = le.u[i] - bv * bg.b_cov[i];
    le.v_up[i] = y[i] - bv * bg.b_up[i];
    le.z[i] = bv * le.v_low[i] - q2 * bg.b_cov[i];
    le.e[i] = (bv / q2) * le.v_low[i] - bg.b_cov[i];
  }
  le.eta = Mat<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      le.eta(i, j) = bg.a(i, j) - bg.b_cov[i] * bg.b_cov[j] - le.v_low[i] * le.v_low[j] / q2;
  return le;
}

template <class T>
LineElement<T> line_element(const BackgroundGeometry& geom, const Vec<double>& x,
                            const Vec<T>& y, double q_floor = kQFloor) {
  return line_element(eval_background(geom, x), x, y, q_floor);
}

/// The scalar tower: characteristic quadratic B, angle f, factor J, metric
/// function K, generating function V, and the charge-derivative scalars M, M^.
/// All fields are b-sign-safe except tau, V, gamma_det (infinite at b = 0).
template <class T>
struct KernelScalars {
  double charge = 0.0;  // the g this tower was evaluated at
  double h = 1.0;       // sqrt(1 - g^2/4)
  double G = 0.0;       // g/h
  double g_plus = 1.0, g_minus = -1.0;
  T B{};          // b^2 + g b q + q^2 > 0
  T tau{};        // B / b^2
  T L{};          // q + (g/2) b
  T A{};          // b + (g/2) q
  T f{};          // atan2(h q, A), in [0, pi]
  T J{};          // exp(-G f / 2)
  T K{};          // sqrt(B) J
  T V{};          // sqrt(tau) J   (generating function; K = bV for b > 0)
  T gamma_det{};  // w^2 V'' = q^2 |b| K / B^2
  T p{}, r{}, t{};  // inverse-metric coefficients: p = g b/q, r = -g/q, t = g(b+gq)/(qB)
  T M{};          // d(ln K^2)/dg = -f/h^3 + (G/2h) q^2/B + b q/(h^2 B)
  T M_hat{};      // M - 2 b q / B
  Vec<T> M_y;     // dM/dy_i = (2q/B^2)(q^2 b_i - b v_i)
  Vec<T> c_dir;   // q^2 b_i - b v_i (the direction the Cartan vector points along)
};

template <class T>
KernelScalars<T> kernel_scalars(const LineElement<T>& le, double g) {
  int n = le.dim;
  KernelScalars<T> ks;
  ks.charge = g;
  ks.h = std::sqrt(1.0 - 0.25 * g * g);
  ks.G = g / ks.h;
  ks.g_plus = 0.5 * g + ks.h;
  ks.g_minus = 0.5 * g - ks.h;
  const T& b = le.b;
  const T& q = le.q;
  ks.B = b * b + g * b * q + q * q;
  ks.tau = ks.B / (b * b);
  ks.L = q + 0.5 * g * b;
  ks.A = b + 0.5 * g * q;
  ks.f = atan2(ks.h * q, ks.A);
  ks.J = exp(-0.5 * ks.G * ks.f);
  ks.K = sqrt(ks.B) * ks.J;
  ks.V = sqrt(ks.tau) * ks.J;
  ks.gamma_det = q * q * fabs(b) * ks.K / (ks.B * ks.B);
  ks.p = g * b / q;
  ks.r = -g / q;
  ks.t = g * (b + g * q) / (q * ks.B);
  double h2 = ks.h * ks.h;
  ks.M = -ks.f / (h2 * ks.h) + (0.5 * ks.G / ks.h) * q * q / ks.B + b * q / (h2 * ks.B);
  ks.M_hat = ks.M - 2.0 * b * q / ks.B;
  ks.c_dir = Vec<T>(n);
  ks.M_y = Vec<T>(n);
  for (int i = 0; i < n; ++i) {
    ks.c_dir[i] = q * q * le.bg.b_cov[i] - b * le.v_low[i];
    ks.M_y[i] = (2.0 * q / (ks.B * ks.B)) * ks.c_dir[i];
  }
  return ks;
}

template <class T>
KernelScalars<T> kernel_scalars(const LineElement<T>& le) {
  return kernel_scalars(le, le.bg.g);
}

/// Metric function K(x, y) alone, valid on all of y != 0 (no q-guard: the
/// kernel itself is finite on the axis). Used by the geodesic tracer.
template <class T>
T metric_function(const BackgroundAt& bg, const Vec<T>& y) {
  int n = bg.dim;
  T s2{}, b{};
  for (int i = 0; i < n; ++i) {
    T u{};
    for (int j = 0; j < n; ++j) u += bg.a(i, j) * y[j];
    s2 += u * y[i];
    b += bg.b_cov[i] * y[i];
  }
  if (!(value(s2) > 0.0)) throw std::invalid_argument("zero tangent vector");
  double g = bg.g;
  double h = std::sqrt(1.0 - 0.25 * g * g);
  T q2 = s2 - b * b;
  T q = sqrt(value(q2) > 0.0 ? q2 : q2 * 0.0);  // clamp the axis ray to q = 0
  T B = b * b + g * b * q + q * q;
  T f = atan2(h * q, b + 0.5 * g * q);
  return sqrt(B) * exp(-0.5 * (g / h) * f);
}

/// Scalars of the charge-derivative family. dA_dg is the g-safe form of the
/// Cartan-vector derivative (finite at g = 0); dA_dg_factor is the printed
/// factor M/2 + 1/g - bq/B and is only populated for |g| >= kChargeFloor.
template <class T>
struct GDerivScalars {
  T dK2_dg{};        // M K^2
  T dM_dg{};         // (1/h^2)[(3g/4) M + q^2/B - (q^2/B^2)(b^2 + g b q/2)]
  T dMhat_dg{};      // dM_dg + 2 b^2 q^2 / B^2
  Vec<T> dMy_dg;     // -(4 b q^2 / B^3)(q^2 b_i - b v_i)
  Vec<T> dA_dg;      // (M/2 - bq/B) A_i + (N K / (2 q B)) (q^2 b_i - b v_i)
  T dA_dg_factor{};  // M/2 + 1/g - bq/B (g != 0 branch)
  bool has_factor = false;
  Vec<T> dP_dg;      // d[(K/(N g)) A^k]/dg = -(y^k - b b^k)/2, exact at all g
};

template <class T>
GDerivScalars<T> g_derivative_scalars(const LineElement<T>& le, const KernelScalars<T>& ks) {
  int n = le.dim;
  double g = ks.charge;
  double h2 = ks.h * ks.h;
  const T& b = le.b;
  const T& q = le.q;
  const T& B = ks.B;
  GDerivScalars<T> d;
  d.dK2_dg = ks.M * ks.K * ks.K;
  d.dM_dg = (1.0 / h2) * ((0.75 * g) * ks.M + q * q / B - (q * q / (B * B)) * (b * b + 0.5 * g * b * q));
  d.dMhat_dg = d.dM_dg + 2.0 * b * b * q * q / (B * B);
  d.dMy_dg = Vec<T>(n);
  d.dA_dg = Vec<T>(n);
  d.dP_dg = Vec<T>(n);
  T cA = 0.5 * ks.M - b * q / B;
  T cR = 0.5 * n * ks.K / (q * B);
  T cGA = g * 0.5 * n * ks.K / (2.0 * q * B);  // (N K g / (2 q B)) / 2 ... assembled below
  (void)cGA;
  for (int i = 0; i < n; ++i) {
    d.dMy_dg[i] = -(4.0 * b * q * q / (B * B * B)) * ks.c_dir[i];
    // A_i = (N K g / (2 q B)) c_dir_i; the 1/g of the printed factor cancels into c_dir
    T A_i = (0.5 * n * ks.K * g / (q * B)) * ks.c_dir[i];
    d.dA_dg[i] = cA * A_i + cR * ks.c_dir[i];
    d.dP_dg[i] = -0.5 * (le.y[i] - b * le.bg.b_up[i]);
  }
  if (std::fabs(g) >= kChargeFloor) {
    d.dA_dg_factor = 0.5 * ks.M + 1.0 / g - b * q / B;
    d.has_factor = true;
  }
  return d;
}

}  // namespace finsler
