#include <doctest.h>

#include "finsler/tensors.hpp"

using namespace finsler;

namespace {

// a mildly curved SPD metric with a unit axis, evaluated at one point
BackgroundAt curved_bg(int n, double g) {
  BackgroundAt bg;
  bg.dim = n;
  bg.a = Mat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bg.a(i, j) = (i == j ? 1.0 : 0.0) + 0.08 / (1.0 + i + j);
  bg.a_inv = inverse(bg.a);
  Vec<double> raw(n);
  for (int i = 0; i < n; ++i) raw[i] = 1.0 / (1.0 + i);
  double nrm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) nrm += raw[i] * bg.a_inv(i, j) * raw[j];
  bg.b_cov = Vec<double>(n);
  for (int i = 0; i < n; ++i) bg.b_cov[i] = raw[i] / std::sqrt(nrm);
  bg.b_up = matvec(bg.a_inv, bg.b_cov);
  bg.g = g;
  return bg;
}

Vec<double> sample_y(int n) {
  Vec<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = 0.9 - 0.35 * i + 0.1 * i * i;
  return y;
}

}  // namespace

TEST_CASE("metric tensor equals half the velocity hessian of K^2") {
  for (int n : {2, 3, 4}) {
    for (double g : {0.8, -1.1}) {
      BackgroundAt bg = curved_bg(n, g);
      Vec<double> x(n);
      Vec<double> y = sample_y(n);
      auto le = line_element(bg, x, y);
      auto ks = kernel_scalars(le);
      auto mp = metric_pack(le, ks);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto yd = detail::seed_dir(detail::seed_dir(y, i), j);
          auto led = line_element(bg, x, yd);
          auto Kd = kernel_scalars(led).K;
          CHECK(0.5 * (Kd * Kd).dot.dot == doctest::Approx(mp.g_low(i, j)).epsilon(1e-11));
        }
      // reciprocity and determinant identity
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += mp.g_low(i, j) * mp.g_up(j, k);
          CHECK(s == doctest::Approx(i == k ? 1.0 : 0.0).epsilon(1e-12));
        }
      CHECK(determinant(mp.g_low) == doctest::Approx(mp.det_identity).epsilon(1e-11));
    }
  }
}

TEST_CASE("zero charge gives the Riemannian metric exactly") {
  BackgroundAt bg = curved_bg(3, 0.0);
  Vec<double> x(3);
  Vec<double> y = sample_y(3);
  auto le = line_element(bg, x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(mp.g_low(i, j) == doctest::Approx(bg.a(i, j)).epsilon(1e-14));
  auto cp = cartan_pack(le, ks, mp);
  CHECK(cp.riemannian_branch);
  for (int i = 0; i < 3; ++i) CHECK(cp.A_low[i] == 0.0);
}

TEST_CASE("Cartan norm: wired arithmetic at N = 3, g = 0.8") {
  BackgroundAt bg = curved_bg(3, 0.8);
  Vec<double> x(3);
  auto le = line_element(bg, x, sample_y(3));
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  auto cp = cartan_pack(le, ks, mp);
  double AA = 0.0;
  for (int i = 0; i < 3; ++i) AA += cp.A_low[i] * cp.A_up[i];
  CHECK(AA == doctest::Approx(1.44).epsilon(1e-12));  // 9 * 0.64 / 4
  CHECK(cp.norm == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("Cartan tensor equals (K/2) dg/dy and its vector is the trace") {
  BackgroundAt bg = curved_bg(4, -0.9);
  Vec<double> x(4);
  Vec<double> y = sample_y(4);
  auto le = line_element(bg, x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  auto cp = cartan_pack(le, ks, mp);
  for (int k = 0; k < 4; ++k) {
    auto led = line_element(bg, x, detail::seed_dir(y, k));
    auto ksd = kernel_scalars(led);
    auto mpd = metric_pack(led, ksd);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(0.5 * ks.K * mpd.g_low(i, j).dot == doctest::Approx(cp.A3(i, j, k)).epsilon(1e-11));
  }
  for (int k = 0; k < 4; ++k) {
    double tr = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) tr += mp.g_up(i, j) * cp.A3(i, j, k);
    CHECK(tr == doctest::Approx(cp.A_low[k]).epsilon(1e-11));
  }
  // contraction: A^k A_ijk = (1/N)(A_i A_j + h_ij A^k A_k)
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += cp.A_up[k] * cp.A3(i, j, k);
      CHECK(s == doctest::Approx((cp.A_low[i] * cp.A_low[j] + mp.h_low(i, j) * cp.norm_sq) / 4.0)
                     .epsilon(1e-11));
    }
}

TEST_CASE("derivative tensors match dual differentiation of the packs") {
  BackgroundAt bg = curved_bg(3, 1.3);
  Vec<double> x(3);
  Vec<double> y = sample_y(3);
  auto le = line_element(bg, x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  auto cp = cartan_pack(le, ks, mp);
  for (int m = 0; m < 3; ++m) {
    auto led = line_element(bg, x, detail::seed_dir(y, m));
    auto ksd = kernel_scalars(led);
    auto mpd = metric_pack(led, ksd);
    auto cpd = cartan_pack(led, ksd, mpd);
    for (int i = 0; i < 3; ++i) {
      CHECK(cpd.A_low[i].dot == doctest::Approx(cp.dA_low_dy(i, m)).epsilon(1e-10));
      CHECK(cpd.A_up[i].dot == doctest::Approx(cp.dA_up_dy(i, m)).epsilon(1e-10));
      for (int j = 0; j < 3; ++j) {
        CHECK(cpd.H_mix(i, j).dot == doctest::Approx(cp.dH_mix_dy(i, j, m)).epsilon(1e-10));
        for (int k = 0; k < 3; ++k)
          CHECK(cpd.A3(i, j, k).dot == doctest::Approx(cp.dA3_dy(i, j, k, m)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("charge-derivative tensors match finite differences in g") {
  BackgroundAt bg = curved_bg(3, 0.7);
  Vec<double> x(3);
  Vec<double> y = sample_y(3);
  auto le = line_element(bg, x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  auto cp = cartan_pack(le, ks, mp);
  auto gt = g_derivative_tensors(le, ks, mp, cp);
  double dg = 1e-6;
  auto ks_p = kernel_scalars(le, 0.7 + dg);
  auto ks_m = kernel_scalars(le, 0.7 - dg);
  auto mp_p = metric_pack(le, ks_p);
  auto mp_m = metric_pack(le, ks_m);
  for (int i = 0; i < 3; ++i) {
    CHECK((mp_p.y_low[i] - mp_m.y_low[i]) / (2 * dg) ==
          doctest::Approx(gt.dy_dg[i]).epsilon(1e-7));
    for (int j = 0; j < 3; ++j)
      CHECK((mp_p.g_low(i, j) - mp_m.g_low(i, j)) / (2 * dg) ==
            doctest::Approx(gt.dgij_dg(i, j)).epsilon(1e-7));
  }
}
