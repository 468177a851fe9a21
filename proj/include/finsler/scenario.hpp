#pragma once

#include <map>
#include <string>

#include "finsler/background.hpp"

namespace finsler {

/// A fully specified verification scenario: background family + parameters,
/// domain box, sampling policy, steps, seed, and the tolerance table.
/// The seed determines the sample set completely.
struct Scenario {
  std::string name;
  int dimension = 3;
  std::string family;  // riemannian-flat | flat-involutive | warped | flat-constant-g | flat-axis-twist
  double g0 = 0.8;
  double mu0 = 0.1;    // charge slope along the axis (flat-involutive)
  double mu1 = 0.0;    // optional slope of the involution scalar itself
  double warp = 0.3;   // k of the warped product
  Vec<double> box_min;
  Vec<double> box_max;
  int samples = 200;
  int curvature_samples = 24;   // heavy second-order-FD checks
  int rank4_samples = 8;        // rank-4 curvature / rho sub-subset
  int validation_points = 16;
  unsigned long long seed = 20240901ull;
  double x_step = 1e-5;
  double x2_step = 1e-4;
  double g_step = 1e-6;
  double y_q_floor = 1e-3;  // reject samples with q/S below this
  double y_b_floor = 1e-3;  // reject samples with |b|/S below this
  ScenarioFlags flags;
  std::map<std::string, double> tolerance_overrides;

  BackgroundGeometry make_geometry() const;
};

/// Builtin catalog: s0 riemannian, s1 flat-involutive, s1q flat-involutive
/// with varying involution scalar, s2 warped-landsberg, s2b warped-berwald
/// (k = 0), s3 flat-constant-g, s4 flat-axis-twist.
Scenario builtin_scenario(const std::string& name, int dimension = 3);

/// Parse a scenario from a JSON document (see README for the schema).
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& file_or_builtin, int dimension = 3);

}  // namespace finsler
