#pragma once

#include <string>
#include <vector>

#include "finsler/scenario.hpp"

namespace finsler {

struct GeodesicStep {
  double t = 0.0;
  Vec<double> x;
  Vec<double> v;  // dx/dt
  double K = 0.0;
};

struct GeodesicResult {
  std::vector<GeodesicStep> steps;
  std::string exit_reason;  // completed | domain-exit | q-guard | error
  double exit_time = 0.0;
  double k_drift = 0.0;     // max |K(t) - K(0)| over the recorded flow
};

/// Fixed-step RK4 integration of x'' + G(x, x') = 0, recording K along the
/// flow. Stops early (with the exit time) if the trajectory leaves the domain
/// box or runs into the axis exclusion zone of the spray.
GeodesicResult trace_geodesic(const Scenario& sc, const BackgroundGeometry& geom,
                              const Vec<double>& x0, const Vec<double>& y0, double t_end,
                              double dt);

}  // namespace finsler
