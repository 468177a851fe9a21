#include <doctest.h>

#include "finsler/kernel.hpp"
#include "finsler/scenario.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

BackgroundAt flat_bg(int n) {
  BackgroundAt bg;
  bg.dim = n;
  bg.a = Mat<double>(n);
  bg.a_inv = Mat<double>(n);
  bg.b_cov = Vec<double>(n);
  bg.b_up = Vec<double>(n);
  for (int i = 0; i < n; ++i) {
    bg.a(i, i) = 1.0;
    bg.a_inv(i, i) = 1.0;
  }
  bg.b_cov[0] = 1.0;
  bg.b_up[0] = 1.0;
  bg.g = 0.8;
  return bg;
}

}  // namespace

TEST_CASE("flat two-dimensional example: all derived variables") {
  BackgroundAt bg = flat_bg(2);
  Vec<double> x(2), y(2);
  y[0] = 1.0;
  y[1] = 1.0;
  auto le = line_element(bg, x, y);
  CHECK(le.b == doctest::Approx(1.0));
  CHECK(le.q == doctest::Approx(1.0));
  CHECK(le.w == doctest::Approx(1.0));
  CHECK(le.S == doctest::Approx(std::sqrt(2.0)));
  CHECK(le.v_low[0] == doctest::Approx(0.0));
  CHECK(le.v_low[1] == doctest::Approx(1.0));
  CHECK(le.z[0] == doctest::Approx(-1.0));
  CHECK(le.z[1] == doctest::Approx(1.0));
  CHECK(le.e[0] == doctest::Approx(-1.0));
  CHECK(le.e[1] == doctest::Approx(1.0));
}

TEST_CASE("exclusion zones: zero vector and the axis ray") {
  BackgroundAt bg = flat_bg(3);
  Vec<double> x(3);
  Vec<double> y0(3);
  CHECK_THROWS_AS(line_element(bg, x, y0), std::invalid_argument);
  Vec<double> yb(3);
  yb[0] = 1.0;  // y = b^i exactly: q = 0
  CHECK_THROWS_AS(line_element(bg, x, yb), std::invalid_argument);
}

TEST_CASE("metric function against the quadrature oracle") {
  // frozen expected value computed from the generating-function integral:
  // b = 1, q = sqrt(2), g = 0.8
  const double frozen = 1.5030748293901763;
  BackgroundAt bg = flat_bg(3);
  Vec<double> x(3), y(3);
  y[0] = 1.0;
  y[1] = 1.0;
  y[2] = 1.0;  // b = 1, q = sqrt 2
  auto le = line_element(bg, x, y);
  auto ks = kernel_scalars(le);
  CHECK(le.q == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ks.K == doctest::Approx(frozen).epsilon(1e-12));
  CHECK(oracles::metric_function_quadrature(1.0, std::sqrt(2.0), 0.8) ==
        doctest::Approx(frozen).epsilon(1e-11));

  // a spread of charges and rays against the quadrature route (b > 0 chart)
  for (double g : {-1.4, -0.5, 0.3, 1.1, 1.9}) {
    for (double b : {0.4, 1.3}) {
      for (double q : {0.2, 0.9, 2.5}) {
        double h = std::sqrt(1 - 0.25 * g * g);
        double B = b * b + g * b * q + q * q;
        double f = std::atan2(h * q, b + 0.5 * g * q);
        double closed = std::sqrt(B) * std::exp(-0.5 * (g / h) * f);
        CHECK(closed ==
              doctest::Approx(oracles::metric_function_quadrature(b, q, g)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("zero charge reduces the kernel to the Riemannian length") {
  BackgroundAt bg = flat_bg(3);
  bg.g = 0.0;
  Vec<double> x(3), y(3);
  y[0] = 0.7;
  y[1] = -0.4;
  y[2] = 0.5;
  auto le = line_element(bg, x, y);
  auto ks = kernel_scalars(le);
  CHECK(ks.K == doctest::Approx(le.S).epsilon(1e-15));
  CHECK(ks.J == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ks.tau == doctest::Approx(1.0 + le.w * le.w).epsilon(1e-14));
  CHECK(ks.V == doctest::Approx(std::sqrt(1.0 + le.w * le.w)).epsilon(1e-14));
}

TEST_CASE("axis length is one and the angle hits its endpoints") {
  BackgroundAt bg = flat_bg(3);
  CHECK(metric_function(bg, bg.b_up) == doctest::Approx(1.0).epsilon(1e-15));
  Vec<double> yneg(3);
  yneg[0] = -1.0;
  // f = pi on the negative axis ray: K(-b) = exp(-G pi / 2) sqrt(B)
  double h = std::sqrt(1 - 0.25 * 0.8 * 0.8);
  CHECK(metric_function(bg, yneg) ==
        doctest::Approx(std::exp(-0.5 * (0.8 / h) * 3.14159265358979323846)).epsilon(1e-12));
}

TEST_CASE("angle branch is continuous across b = 0") {
  BackgroundAt bg = flat_bg(3);
  Vec<double> x(3);
  Vec<double> yp(3), ym(3);
  yp[0] = 1e-7;
  yp[1] = 1.0;
  yp[2] = 0.3;
  ym[0] = -1e-7;
  ym[1] = 1.0;
  ym[2] = 0.3;
  auto fp = kernel_scalars(line_element(bg, x, yp)).f;
  auto fm = kernel_scalars(line_element(bg, x, ym)).f;
  CHECK(std::fabs(fp - fm) < 1e-6);
  auto Kp = kernel_scalars(line_element(bg, x, yp)).K;
  auto Km = kernel_scalars(line_element(bg, x, ym)).K;
  CHECK(std::fabs(Kp - Km) < 1e-6);
}

TEST_CASE("positive homogeneity holds exactly") {
  BackgroundAt bg = flat_bg(4);
  Vec<double> x(4), y(4);
  y[0] = 0.9;
  y[1] = 0.4;
  y[2] = -0.7;
  y[3] = 0.2;
  double K1 = metric_function(bg, y);
  for (double lam : {0.5, 2.0, 7.0}) {
    Vec<double> ys(4);
    for (int i = 0; i < 4; ++i) ys[i] = lam * y[i];
    CHECK(metric_function(bg, ys) == doctest::Approx(lam * K1).epsilon(1e-13));
  }
}

TEST_CASE("charge derivative of K^2 against the finite-difference oracle") {
  BackgroundAt bg = flat_bg(3);
  Vec<double> x(3), y(3);
  y[0] = 1.1;
  y[1] = -0.5;
  y[2] = 0.8;
  auto le = line_element(bg, x, y);
  for (double g : {0.0, 0.8, -1.2}) {  // includes the zero-charge limit
    auto ks = kernel_scalars(le, g);
    auto gd = g_derivative_scalars(le, ks);
    double fd = oracles::central_diff(
        [&](double gg) {
          auto k2 = kernel_scalars(le, gg);
          return k2.K * k2.K;
        },
        g, 1e-6);
    CHECK(gd.dK2_dg == doctest::Approx(fd).epsilon(1e-8));
  }
}
