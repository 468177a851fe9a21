#include "finsler/geodesic.hpp"

#include <cmath>

#include "finsler/spray.hpp"

namespace finsler {

namespace {

struct State {
  Vec<double> x, v;
};

State axpy(const State& s, double h, const State& d) {
  int n = s.x.size();
  State r{Vec<double>(n), Vec<double>(n)};
  for (int i = 0; i < n; ++i) {
    r.x[i] = s.x[i] + h * d.x[i];
    r.v[i] = s.v[i] + h * d.v[i];
  }
  return r;
}

}  // namespace

GeodesicResult trace_geodesic(const Scenario& sc, const BackgroundGeometry& geom,
                              const Vec<double>& x0, const Vec<double>& y0, double t_end,
                              double dt) {
  int n = geom.dim;
  GeodesicResult res;
  res.exit_reason = "completed";

  auto inside = [&](const Vec<double>& x) {
    for (int i = 0; i < n; ++i)
      if (x[i] < sc.box_min[i] || x[i] > sc.box_max[i]) return false;
    return true;
  };
  auto deriv = [&](const State& s) {
    PointFrame fr = build_point_frame(geom, s.x);
    Vec<double> G = spray(fr, s.v);
    State d{s.v, Vec<double>(n)};
    for (int i = 0; i < n; ++i) d.v[i] = -G[i];
    return d;
  };
  auto record = [&](double t, const State& s) {
    BackgroundAt bg = eval_background(geom, s.x);
    double K = metric_function(bg, s.v);
    res.steps.push_back({t, s.x, s.v, K});
  };

  State s{x0, y0};
  int nsteps = (int)std::llround(t_end / dt);
  double t = 0.0;
  try {
    record(t, s);
    for (int step = 0; step < nsteps; ++step) {
      State k1 = deriv(s);
      State k2 = deriv(axpy(s, 0.5 * dt, k1));
      State k3 = deriv(axpy(s, 0.5 * dt, k2));
      State k4 = deriv(axpy(s, dt, k3));
      int nn = n;
      State next{Vec<double>(nn), Vec<double>(nn)};
      for (int i = 0; i < nn; ++i) {
        next.x[i] = s.x[i] + dt / 6.0 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
        next.v[i] = s.v[i] + dt / 6.0 * (k1.v[i] + 2 * k2.v[i] + 2 * k3.v[i] + k4.v[i]);
      }
      s = next;
      t += dt;
      if (!inside(s.x)) {
        res.exit_reason = "domain-exit";
        break;
      }
      record(t, s);
    }
  } catch (const std::invalid_argument&) {
    res.exit_reason = "q-guard";
  } catch (const std::exception&) {
    res.exit_reason = "error";
  }
  res.exit_time = t;
  if (!res.steps.empty()) {
    double k0 = res.steps.front().K;
    for (const auto& st : res.steps) res.k_drift = std::max(res.k_drift, std::fabs(st.K - k0));
  }
  return res;
}

}  // namespace finsler
