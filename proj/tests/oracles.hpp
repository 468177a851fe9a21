#pragma once

// Test-only oracles, independent of the engine's closed-form paths.

#include <cmath>
#include <functional>

namespace oracles {

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fb, double fm, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, fm, flm, eps / 2, depth - 1) +
         simpson(f, m, b, fm, fb, frm, eps / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fb, fm, eps, 40);
}

/// Metric function through the generating-function integral: K = b * V(w),
/// V(w) = exp( int_0^w s / (1 + g s + s^2) ds ), valid for b > 0.
inline double metric_function_quadrature(double b, double q, double g) {
  double w = q / b;
  double I = integrate([g](double s) { return s / (1.0 + g * s + s * s); }, 0.0, w);
  return b * std::exp(I);
}

/// Central difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles
