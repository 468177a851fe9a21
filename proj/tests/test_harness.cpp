#include <doctest.h>

#include "finsler/geodesic.hpp"
#include "finsler/harness.hpp"
#include "finsler/kernel.hpp"
#include "finsler/sampling.hpp"

using namespace finsler;

TEST_CASE("scenario parsing: builtins, files, and errors") {
  Scenario s1 = load_scenario("s1", 3);
  CHECK(s1.flags.involutive);
  CHECK(s1.dimension == 3);
  CHECK_THROWS(load_scenario("no-such-builtin-or-file"));
  Scenario parsed = parse_scenario(R"({
    "builtin": "s2", "dimension": 4, "samples": 17, "seed": 99,
    "tolerances": {"metric.hessian": 1e-7}
  })");
  CHECK(parsed.dimension == 4);
  CHECK(parsed.samples == 17);
  CHECK(parsed.seed == 99);
  CHECK(parsed.tolerance_overrides.at("metric.hessian") == 1e-7);
  CHECK_THROWS_WITH_AS(parse_scenario("{nope"), doctest::Contains("parse error"),
                       std::runtime_error);
  CHECK_THROWS(parse_scenario(R"({"dimension": 9, "background": {"type": "flat-constant-g"}})"));
}

TEST_CASE("sampler is deterministic and honors the exclusion floors") {
  Scenario sc = builtin_scenario("s1", 3);
  BackgroundGeometry geom = sc.make_geometry();
  SampleRng r1(42), r2(42);
  for (int i = 0; i < 50; ++i) {
    SamplePoint a = sample_line_element(sc, geom, r1);
    SamplePoint b = sample_line_element(sc, geom, r2);
    for (int k = 0; k < 3; ++k) {
      CHECK(a.x[k] == b.x[k]);
      CHECK(a.y[k] == b.y[k]);
    }
    BackgroundAt bg = eval_background(geom, a.x);
    double S2 = 0.0, bb = 0.0;
    for (int p = 0; p < 3; ++p) {
      bb += bg.b_cov[p] * a.y[p];
      for (int q = 0; q < 3; ++q) S2 += a.y[p] * bg.a(p, q) * a.y[q];
    }
    double S = std::sqrt(S2);
    CHECK(std::fabs(bb) / S >= sc.y_b_floor);
    CHECK(std::sqrt(std::max(0.0, S2 - bb * bb)) / S >= sc.y_q_floor);
    CHECK(S >= 0.5 - 1e-12);
    CHECK(S <= 2.0 + 1e-12);
  }
}

TEST_CASE("sampler reports exhaustion instead of spinning forever") {
  Scenario sc = builtin_scenario("s1", 3);
  sc.y_b_floor = 0.999999;  // impossible together with the q floor
  BackgroundGeometry geom = sc.make_geometry();
  SampleRng rng(7);
  CHECK_THROWS_WITH_AS(sample_line_element(sc, geom, rng, 200),
                       doctest::Contains("exclusion"), std::runtime_error);
}

TEST_CASE("report body is byte-identical across runs and thread counts") {
  Scenario sc = builtin_scenario("s1", 3);
  sc.samples = 6;
  sc.curvature_samples = 2;
  sc.validation_points = 2;
  VerificationReport r1 = run_suite(sc);
#if defined(_WIN32)
  VerificationReport r2 = run_suite(sc);
#else
  setenv("FINSLEROID_THREADS", "1", 1);
  VerificationReport r2 = run_suite(sc);
  unsetenv("FINSLEROID_THREADS");
#endif
  CHECK(r1.body_json() == r2.body_json());
  CHECK(r1.body_json().find("runtime") == std::string::npos);
}

TEST_CASE("geodesics: straight lines on x-independent scenarios, domain exits reported") {
  Scenario sc = builtin_scenario("s3", 3);
  BackgroundGeometry geom = sc.make_geometry();
  Vec<double> x0(3), y0(3);
  y0[0] = 0.4;
  y0[1] = 0.3;
  y0[2] = 0.1;
  GeodesicResult res = trace_geodesic(sc, geom, x0, y0, 1.0, 1e-2);
  CHECK(res.exit_reason == "completed");
  CHECK(res.k_drift < 1e-14);
  const auto& last = res.steps.back();
  for (int i = 0; i < 3; ++i) CHECK(last.x[i] == doctest::Approx(y0[i] * 1.0).epsilon(1e-12));

  Vec<double> fast(3);
  fast[0] = 3.0;
  fast[1] = 2.0;
  fast[2] = 0.5;
  GeodesicResult exit = trace_geodesic(sc, geom, x0, fast, 1.0, 1e-2);
  CHECK(exit.exit_reason == "domain-exit");
  CHECK(exit.exit_time < 1.0);

  // aiming the flow at the axis ray trips the exclusion guard mid-flight
  Scenario s1 = builtin_scenario("s1", 3);
  BackgroundGeometry g1 = s1.make_geometry();
  Vec<double> near_axis(3);
  near_axis[0] = 0.5;
  near_axis[1] = 0.5 * kQFloor;
  GeodesicResult guard = trace_geodesic(s1, g1, x0, near_axis, 1.0, 1e-2);
  CHECK(guard.exit_reason == "q-guard");
}

TEST_CASE("eval dump selectors") {
  Scenario sc = builtin_scenario("s1", 3);
  Vec<double> x(3), y(3);
  y[0] = 0.8;
  y[1] = 0.5;
  y[2] = -0.3;
  for (const char* pack : {"line", "kernel", "metric", "cartan", "gderiv", "spray", "frame"}) {
    std::string dump = eval_dump(sc, x, y, pack);
    CHECK(dump.find("formula") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(eval_dump(sc, x, y, "nonsense"), doctest::Contains("unknown pack"),
                       std::runtime_error);
}
