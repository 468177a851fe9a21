#include <doctest.h>

#include "finsler/curvature.hpp"
#include "finsler/scenario.hpp"
#include "finsler/spray.hpp"

using namespace finsler;

namespace {

Vec<double> point3(double a, double b, double c) {
  Vec<double> x(3);
  x[0] = a;
  x[1] = b;
  x[2] = c;
  return x;
}

}  // namespace

TEST_CASE("x-independent scenario has zero spray") {
  Scenario sc = builtin_scenario("s3", 3);
  BackgroundGeometry geom = sc.make_geometry();
  PointFrame fr = build_point_frame(geom, point3(0.2, 0.1, -0.3));
  Vec<double> G = spray(fr, point3(0.8, 0.5, 0.4));
  for (int k = 0; k < 3; ++k) CHECK(G[k] == doctest::Approx(0.0));
}

TEST_CASE("warped Landsberg spray reduces to g k q (y - b b^k) + riemannian part") {
  Scenario sc = builtin_scenario("s2", 3);
  BackgroundGeometry geom = sc.make_geometry();
  Vec<double> x = point3(0.2, 0.4, -0.3);
  Vec<double> y = point3(0.8, 0.5, 0.6);
  PointFrame fr = build_point_frame(geom, x);
  Vec<double> G = spray(fr, y);
  auto le = line_element(fr.bg, x, y);
  for (int k = 0; k < 3; ++k) {
    double quad = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) quad += fr.christoffels(k, i, j) * y[i] * y[j];
    double closed = sc.g0 * sc.warp * le.q * le.v_up[k] + quad;
    CHECK(G[k] == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("spray equals the Finslerian-Christoffel contraction on a general background") {
  Scenario sc = builtin_scenario("s4", 3);  // flat metric, twisting axis, varying charge
  BackgroundGeometry geom = sc.make_geometry();
  Vec<double> x = point3(0.3, -0.2, 0.5);
  Vec<double> y = point3(0.7, 0.9, -0.6);
  PointFrame fr = build_point_frame(geom, x);
  Vec<double> G = spray(fr, y);
  Ten3<double> gam = finsler_christoffels(geom, x, y);
  for (int k = 0; k < 3; ++k) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += gam(k, i, j) * y[i] * y[j];
    CHECK(G[k] == doctest::Approx(s).epsilon(1e-7));
  }
}

TEST_CASE("charge-gradient spray vanishes for constant charge and reduces under involution") {
  Scenario s2 = builtin_scenario("s2", 3);
  BackgroundGeometry g2 = s2.make_geometry();
  PointFrame fr2 = build_point_frame(g2, point3(0.1, 0.2, 0.3));
  Vec<double> E2 = charge_spray(fr2, point3(0.5, 0.7, 0.2));
  for (int k = 0; k < 3; ++k) CHECK(E2[k] == doctest::Approx(0.0));

  Scenario s1 = builtin_scenario("s1", 3);
  BackgroundGeometry g1 = s1.make_geometry();
  Vec<double> x = point3(0.2, -0.3, 0.4);
  Vec<double> y = point3(0.8, 0.6, -0.45);
  FrameOptions fo;
  fo.involutive = true;
  PointFrame fr1 = build_point_frame(g1, x, fo);
  Vec<double> E = charge_spray(fr1, y);
  auto le = line_element(fr1.bg, x, y);
  auto ks = kernel_scalars(le);
  auto mp = metric_pack(le, ks);
  auto cp = cartan_pack(le, ks, mp);
  double yg = 0.0;
  for (int i = 0; i < 3; ++i) yg += y[i] * fr1.g_grad[i];
  for (int k = 0; k < 3; ++k) {
    double red = 0.5 * ks.M * yg * y[k] -
                 ks.M_hat * ks.K * (le.w / (3 * ks.charge)) * yg * cp.A_up[k];
    CHECK(E[k] == doctest::Approx(red).epsilon(1e-12));
  }
}

TEST_CASE("spray jets satisfy the homogeneity ladder") {
  Scenario sc = builtin_scenario("s1", 3);
  BackgroundGeometry geom = sc.make_geometry();
  FrameOptions fo;
  fo.involutive = true;
  PointFrame fr = build_point_frame(geom, point3(0.15, -0.2, 0.35), fo);
  Vec<double> y = point3(0.9, 0.5, -0.4);
  SprayJet jet = spray_jet(fr, y, 3);
  for (int i = 0; i < 3; ++i) {
    double gy = 0.0;
    for (int k = 0; k < 3; ++k) gy += jet.G_y(i, k) * y[k];
    CHECK(gy == doctest::Approx(2.0 * jet.G[i]).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
      double gyy = 0.0;
      for (int m = 0; m < 3; ++m) gyy += jet.G_yy(i, k, m) * y[m];
      CHECK(gyy == doctest::Approx(jet.G_y(i, k)).epsilon(1e-12));
      for (int m = 0; m < 3; ++m) {
        double g3 = 0.0;
        for (int p = 0; p < 3; ++p) g3 += jet.G_yyy(i, k, m, p) * y[p];
        CHECK(g3 == doctest::Approx(0.0).epsilon(1e-10));
      }
    }
  }
}
