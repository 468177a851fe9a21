#include "finsler/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace finsler {

namespace {

Vec<double> box_fill(int n, double v) {
  Vec<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = v;
  return r;
}

}  // namespace

BackgroundGeometry Scenario::make_geometry() const {
  BackgroundGeometry geom;
  geom.dim = dimension;
  geom.x_step = x_step;
  geom.x2_step = x2_step;
  int n = dimension;

  if (family == "riemannian-flat" || family == "flat-constant-g" ||
      family == "flat-involutive") {
    geom.metric = [n](const Vec<double>&) {
      Mat<double> a(n);
      for (int i = 0; i < n; ++i) a(i, i) = 1.0;
      return a;
    };
    geom.axis = [n](const Vec<double>&) {
      Vec<double> b(n);
      b[0] = 1.0;
      return b;
    };
    if (family == "riemannian-flat") {
      geom.charge = [](const Vec<double>&) { return 0.0; };
    } else if (family == "flat-constant-g") {
      double g0c = g0;
      geom.charge = [g0c](const Vec<double>&) { return g0c; };
    } else {
      double g0c = g0, m0 = mu0, m1 = mu1;
      geom.charge = [g0c, m0, m1](const Vec<double>& x) {
        double s = x[0];  // <b, x> for the constant axis e_1
        return g0c + m0 * s + 0.5 * m1 * s * s;
      };
    }
    return geom;
  }
  if (family == "warped") {
    double k = warp;
    geom.metric = [n, k](const Vec<double>& x) {
      Mat<double> a(n);
      a(0, 0) = 1.0;
      double e = std::exp(2.0 * k * x[0]);
      for (int i = 1; i < n; ++i) a(i, i) = e;
      return a;
    };
    geom.axis = [n](const Vec<double>&) {
      Vec<double> b(n);
      b[0] = 1.0;
      return b;
    };
    double g0c = g0;
    geom.charge = [g0c](const Vec<double>&) { return g0c; };
    return geom;
  }
  if (family == "flat-axis-twist") {
    // flat metric, axis rotating in the (1,2)-plane, non-involutive charge:
    // exercises the s_k = y^m nabla_k b_m terms of the x-derivative formulas.
    geom.metric = [n](const Vec<double>&) {
      Mat<double> a(n);
      for (int i = 0; i < n; ++i) a(i, i) = 1.0;
      return a;
    };
    geom.axis = [n](const Vec<double>& x) {
      double th = 0.3 * x[0] - 0.2 * x[1] + (n > 2 ? 0.15 * x[2] : 0.0);
      Vec<double> b(n);
      b[0] = std::cos(th);
      b[1] = std::sin(th);
      return b;
    };
    double g0c = g0;
    geom.charge = [g0c](const Vec<double>& x) {
      return g0c + 0.15 * std::sin(x[1] + 0.4 * x[0]);
    };
    return geom;
  }
  throw std::runtime_error("unknown background family: " + family);
}

Scenario builtin_scenario(const std::string& name, int dimension) {
  Scenario s;
  s.dimension = dimension;
  s.box_min = box_fill(dimension, -1.0);
  s.box_max = box_fill(dimension, 1.0);
  if (name == "s0" || name == "riemannian") {
    s.name = "s0-riemannian";
    s.family = "riemannian-flat";
    s.g0 = 0.0;
    s.flags.b_parallel = true;
    s.flags.closed_b = true;
    return s;
  }
  if (name == "s1" || name == "flat-involutive") {
    s.name = "s1-flat-involutive";
    s.family = "flat-involutive";
    s.g0 = 0.8;
    s.mu0 = 0.1;
    s.flags.involutive = true;
    s.flags.b_parallel = true;
    s.flags.closed_b = true;
    return s;
  }
  if (name == "s1q" || name == "flat-involutive-varying-mu") {
    s.name = "s1q-flat-involutive-varying-mu";
    s.family = "flat-involutive";
    s.g0 = 0.8;
    s.mu0 = 0.1;
    s.mu1 = 0.05;
    s.flags.involutive = true;
    s.flags.b_parallel = true;
    s.flags.closed_b = true;
    return s;
  }
  if (name == "s2" || name == "warped-landsberg") {
    s.name = "s2-warped-landsberg";
    s.family = "warped";
    s.g0 = 0.8;
    s.warp = 0.3;
    s.flags.landsberg = true;
    s.flags.closed_b = true;
    return s;
  }
  if (name == "s2b" || name == "warped-berwald") {
    s.name = "s2b-warped-berwald";
    s.family = "warped";
    s.g0 = 0.8;
    s.warp = 0.0;
    s.flags.landsberg = true;
    s.flags.berwald = true;
    s.flags.closed_b = true;
    return s;
  }
  if (name == "s3" || name == "flat-constant-g") {
    s.name = "s3-flat-constant-g";
    s.family = "flat-constant-g";
    s.g0 = 0.8;
    s.flags.b_parallel = true;
    s.flags.closed_b = true;
    s.flags.landsberg = true;
    s.flags.berwald = true;
    return s;
  }
  if (name == "s4" || name == "flat-axis-twist") {
    s.name = "s4-flat-axis-twist";
    s.family = "flat-axis-twist";
    s.g0 = 0.6;
    return s;
  }
  throw std::runtime_error("unknown builtin scenario: " + name);
}

Scenario parse_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("scenario parse error: ") + e.what());
  }
  Scenario s;
  if (j.contains("builtin")) {
    s = builtin_scenario(j["builtin"].get<std::string>(),
                         j.value("dimension", 3));
  } else {
    s.dimension = j.value("dimension", 3);
    s.name = j.value("name", "custom");
    if (!j.contains("background") || !j["background"].contains("type"))
      throw std::runtime_error("scenario parse error: background.type is required");
    const auto& bg = j["background"];
    s.family = bg["type"].get<std::string>();
    s.g0 = bg.value("g0", 0.8);
    s.mu0 = bg.value("mu0", 0.1);
    s.mu1 = bg.value("mu1", 0.0);
    s.warp = bg.value("k", 0.3);
    s.box_min = box_fill(s.dimension, -1.0);
    s.box_max = box_fill(s.dimension, 1.0);
  }
  if (s.dimension < 2 || s.dimension > kMaxDim)
    throw std::runtime_error("dimension must be in [2, 6]");
  if (j.contains("domain")) {
    auto lo = j["domain"]["min"].get<std::vector<double>>();
    auto hi = j["domain"]["max"].get<std::vector<double>>();
    if ((int)lo.size() != s.dimension || (int)hi.size() != s.dimension)
      throw std::runtime_error("domain box size does not match dimension");
    for (int i = 0; i < s.dimension; ++i) {
      s.box_min[i] = lo[i];
      s.box_max[i] = hi[i];
    }
  }
  s.samples = j.value("samples", s.samples);
  s.curvature_samples = j.value("curvature_samples", s.curvature_samples);
  s.rank4_samples = j.value("rank4_samples", s.rank4_samples);
  s.validation_points = j.value("validation_points", s.validation_points);
  s.seed = j.value("seed", s.seed);
  s.x_step = j.value("x_step", s.x_step);
  s.x2_step = j.value("x2_step", s.x2_step);
  s.g_step = j.value("g_step", s.g_step);
  s.y_q_floor = j.value("y_q_floor", s.y_q_floor);
  s.y_b_floor = j.value("y_b_floor", s.y_b_floor);
  if (j.contains("flags")) {
    const auto& f = j["flags"];
    s.flags.involutive = f.value("involutive", s.flags.involutive);
    s.flags.b_parallel = f.value("b_parallel", s.flags.b_parallel);
    s.flags.closed_b = f.value("closed_b", s.flags.closed_b);
    s.flags.landsberg = f.value("landsberg", s.flags.landsberg);
    s.flags.berwald = f.value("berwald", s.flags.berwald);
  }
  if (j.contains("tolerances"))
    for (auto& [key, val] : j["tolerances"].items())
      s.tolerance_overrides[key] = val.get<double>();
  return s;
}

Scenario load_scenario(const std::string& file_or_builtin, int dimension) {
  // builtin names first, then the filesystem
  for (const char* name :
       {"s0", "riemannian", "s1", "flat-involutive", "s1q", "flat-involutive-varying-mu",
        "s2", "warped-landsberg", "s2b", "warped-berwald", "s3", "flat-constant-g", "s4",
        "flat-axis-twist"})
    if (file_or_builtin == name) return builtin_scenario(name, dimension);
  std::ifstream in(file_or_builtin);
  if (!in) throw std::runtime_error("cannot open scenario file: " + file_or_builtin);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace finsler
