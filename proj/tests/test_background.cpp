#include <doctest.h>

#include "finsler/background.hpp"
#include "finsler/scenario.hpp"

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

TEST_CASE("constant-coefficient fields have a trivial frame") {
  Scenario sc = builtin_scenario("s1", 3);
  BackgroundGeometry geom = sc.make_geometry();
  FrameOptions fo;
  fo.involutive = true;
  fo.with_riemann = true;
  PointFrame fr = build_point_frame(geom, point3(0.2, -0.4, 0.1), fo);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(fr.christoffels(k, i, j) == doctest::Approx(0.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(fr.nabla_b(i, j) == doctest::Approx(0.0));
  // g = 0.8 + 0.1 x^1 along the axis
  CHECK(fr.g_grad[0] == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(fr.g_grad[1] == doctest::Approx(0.0));
  CHECK(fr.mu.has_value());
  CHECK(*fr.mu == doctest::Approx(0.1).epsilon(1e-9));
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) CHECK(fr.riemann(a, i, k, m) == doctest::Approx(0.0));
}

TEST_CASE("warped product: nabla b = k (a - b x b), christoffels match the symbolic form") {
  Scenario sc = builtin_scenario("s2", 3);
  double k = sc.warp;
  BackgroundGeometry geom = sc.make_geometry();
  Vec<double> x = point3(0.3, 0.1, -0.2);
  PointFrame fr = build_point_frame(geom, x);
  double e2kt = std::exp(2.0 * k * x[0]);
  // symbolic: Gamma^0_{ij} = -k e^{2kt} delta_ij (spatial), Gamma^i_{0j} = k delta^i_j
  for (int i = 1; i < 3; ++i)
    for (int j = 1; j < 3; ++j) {
      CHECK(fr.christoffels(0, i, j) ==
            doctest::Approx(-k * e2kt * (i == j ? 1.0 : 0.0)).epsilon(1e-7));
      CHECK(fr.christoffels(i, 0, j) == doctest::Approx(k * (i == j ? 1.0 : 0.0)).epsilon(1e-7));
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double r = fr.bg.a(i, j) - fr.bg.b_cov[i] * fr.bg.b_cov[j];
      CHECK(fr.nabla_b(i, j) == doctest::Approx(k * r).epsilon(1e-8));
    }
  ScenarioFlags flags;
  flags.landsberg = true;
  flags.closed_b = true;
  FrameDiagnostics diag = validate_frame(geom, fr, flags);
  CHECK(diag.all_pass);
}

TEST_CASE("invariant violations are rejected") {
  Scenario sc = builtin_scenario("s1", 3);
  BackgroundGeometry geom = sc.make_geometry();
  SUBCASE("axis rescaled to norm 1.01") {
    geom.axis = [](const Vec<double>&) {
      Vec<double> b(3);
      b[0] = 1.01;
      return b;
    };
    CHECK_THROWS_WITH_AS(build_point_frame(geom, point3(0, 0, 0)),
                         doctest::Contains("not unit"), std::runtime_error);
  }
  SUBCASE("charge outside (-2, 2)") {
    geom.charge = [](const Vec<double>&) { return 2.3; };
    CHECK_THROWS_WITH_AS(build_point_frame(geom, point3(0, 0, 0)),
                         doctest::Contains("charge out of range"), std::runtime_error);
  }
  SUBCASE("non-positive-definite metric") {
    geom.metric = [](const Vec<double>&) {
      Mat<double> a(3);
      a(0, 0) = 1.0;
      a(1, 1) = -1.0;
      a(2, 2) = 1.0;
      return a;
    };
    CHECK_THROWS_AS(build_point_frame(geom, point3(0, 0, 0)), std::runtime_error);
  }
}

TEST_CASE("involutive flag fails when the charge gradient is not along the axis") {
  Scenario sc = builtin_scenario("s1", 3);
  BackgroundGeometry geom = sc.make_geometry();
  geom.charge = [](const Vec<double>& x) { return 0.8 + 0.1 * x[1] * x[1]; };
  FrameOptions fo;
  fo.involutive = true;
  PointFrame fr = build_point_frame(geom, point3(0.1, 0.5, 0.0), fo);
  ScenarioFlags flags;
  flags.involutive = true;
  FrameDiagnostics diag = validate_frame(geom, fr, flags);
  bool involutive_pass = true;
  for (const auto& e : diag.entries)
    if (e.property == "involutive") involutive_pass = e.pass;
  CHECK_FALSE(involutive_pass);
}
