#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "finsler/scenario.hpp"

namespace finsler {

/// Deterministic RNG helpers. Distributions are hand-rolled on top of
/// mt19937_64 so that reports are byte-identical across standard libraries.
class SampleRng {
 public:
  explicit SampleRng(unsigned long long seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return double(eng_() >> 11) * 0x1p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {  // Box-Muller, fresh pair every call
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

struct SamplePoint {
  Vec<double> x;
  Vec<double> y;
};

/// Draw a line element: x uniform in the box; y isotropic on the a(x)-unit
/// sphere, rejected while q/S or |b|/S is under the floors, then rescaled by
/// lambda in [0.5, 2] to exercise homogeneity. Throws after max_tries.
inline SamplePoint sample_line_element(const Scenario& sc, const BackgroundGeometry& geom,
                                       SampleRng& rng, int max_tries = 10000) {
  int n = sc.dimension;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Vec<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(sc.box_min[i], sc.box_max[i]);
    BackgroundAt bg = eval_background(geom, x);
    Mat<double> L = cholesky(bg.a);
    // xi = L^{-T} eta has a(x)-isotropic direction
    Vec<double> etav(n);
    for (int i = 0; i < n; ++i) etav[i] = rng.normal();
    Vec<double> y(n);
    for (int i = n - 1; i >= 0; --i) {
      double s = etav[i];
      for (int j = i + 1; j < n; ++j) s -= L(j, i) * y[j];
      y[i] = s / L(i, i);
    }
    double S2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) S2 += y[i] * bg.a(i, j) * y[j];
    double S = std::sqrt(S2);
    if (!(S > 0.0)) continue;
    for (int i = 0; i < n; ++i) y[i] /= S;
    double b = dot(bg.b_cov, y);
    double q = std::sqrt(std::max(0.0, 1.0 - b * b));
    if (q < sc.y_q_floor || std::fabs(b) < sc.y_b_floor) continue;
    double lam = rng.uniform(0.5, 2.0);
    for (int i = 0; i < n; ++i) y[i] *= lam;
    return {x, y};
  }
  throw std::runtime_error("sample generation failed: exclusion zones reject everything");
}

}  // namespace finsler
