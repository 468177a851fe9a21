#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finsler/linalg.hpp"

namespace finsler {

/// The associated Riemannian space plus the axis 1-form and the charge field.
/// Fields are arbitrary smooth closures of the base point; x-derivatives are
/// taken by central differences (the engine assumes no symbolic access).
struct BackgroundGeometry {
  int dim = 0;
  std::function<Mat<double>(const Vec<double>&)> metric;  // a_ij(x), symmetric positive definite
  std::function<Vec<double>(const Vec<double>&)> axis;    // b_i(x), unit: a^ij b_i b_j = 1
  std::function<double(const Vec<double>&)> charge;       // g(x) in (-2, 2)
  double x_step = 1e-5;   // first-derivative step
  double x2_step = 1e-4;  // second-derivative step (curvature of a)
};

/// Pointwise field values with the axis raised and the metric inverted.
struct BackgroundAt {
  int dim = 0;
  Mat<double> a;
  Mat<double> a_inv;
  Vec<double> b_cov;
  Vec<double> b_up;
  double g = 0.0;
};

/// Derivative data of the background at one base point.
/// christoffels(k,i,j) = a^k_{ij}; nabla_b(i,j) = nabla_i b_j;
/// riemann(n,i,k,m) = a_n{}^i{}_{km} = d_k a^i_{nm} - d_m a^i_{nk}
///                    + a^i_{kh} a^h_{nm} - a^i_{mh} a^h_{nk}.
struct PointFrame {
  Vec<double> x;
  BackgroundAt bg;
  Ten3<double> christoffels;
  Mat<double> nabla_b;
  Vec<double> g_grad;
  std::optional<double> mu;  // involution scalar b^i g_i, when the scenario declares involution
  bool has_riemann = false;
  Ten4<double> riemann;
};

struct FrameOptions {
  bool with_riemann = false;
  bool involutive = false;
};

/// Evaluate and validate the fields at x. Throws std::runtime_error on a
/// non-positive-definite metric, a non-unit axis, or a charge outside (-2, 2).
BackgroundAt eval_background(const BackgroundGeometry& geom, const Vec<double>& x);

PointFrame build_point_frame(const BackgroundGeometry& geom, const Vec<double>& x,
                             const FrameOptions& opts = {});

/// Declared structural properties of a scenario, checked by validate_frame.
struct ScenarioFlags {
  bool involutive = false;
  bool b_parallel = false;
  bool closed_b = false;
  bool landsberg = false;  // nabla_m b_n = k (a_mn - b_m b_n) with g constant
  bool berwald = false;    // landsberg with k = 0
};

struct DiagnosticsEntry {
  std::string property;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool checked = false;
};

struct FrameDiagnostics {
  std::vector<DiagnosticsEntry> entries;
  bool all_pass = true;
};

/// Pass/fail record per declared property at one base point (diagnostics only,
/// never throws). Unit norm and charge range are always checked.
FrameDiagnostics validate_frame(const BackgroundGeometry& geom, const PointFrame& frame,
                                const ScenarioFlags& flags, double tol = 1e-7);

}  // namespace finsler
