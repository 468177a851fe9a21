// Acceptance suite: one pass/fail line per criterion, tolerances pinned here.
// Usage: acceptance [--criterion N]   (default: run all)

#include <cstring>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/geodesic.hpp"
#include "finsler/harness.hpp"
#include "finsler/sampling.hpp"

using namespace finsler;

namespace {

struct SuiteCache {
  std::map<std::string, VerificationReport> reports;

  const VerificationReport& get(const std::string& name, int dim, int curvature_samples,
                                int rank4_samples = 0) {
    std::ostringstream key;
    key << name << "/" << dim << "/" << curvature_samples << "/" << rank4_samples;
    auto it = reports.find(key.str());
    if (it != reports.end()) return it->second;
    Scenario sc = builtin_scenario(name, dim);
    sc.samples = 200;
    sc.curvature_samples = curvature_samples;
    sc.rank4_samples = rank4_samples;
    auto [ins, ok] = reports.emplace(key.str(), run_suite(sc));
    (void)ok;
    return ins->second;
  }
};

double resid(const VerificationReport& rep, const std::string& id) {
  for (const auto& c : rep.checks)
    if (c.id == id) {
      if (c.status == "skipped") return -1.0;  // treated as "not present"
      return c.max_residual;
    }
  return -1.0;
}

struct Criterion {
  int number;
  std::string title;
  bool pass = true;
  double worst = 0.0;
  std::vector<std::string> details;

  void require(const std::string& what, double value, double tol) {
    if (value < 0) {
      pass = false;
      details.push_back(what + ": missing (skipped or unknown check)");
      return;
    }
    worst = std::max(worst, value);
    if (value > tol) {
      pass = false;
      std::ostringstream os;
      os << what << ": residual " << std::scientific << std::setprecision(3) << value
         << " > tol " << tol;
      details.push_back(os.str());
    }
  }
};

void print_line(const Criterion& c, const std::string& note = "") {
  std::cout << (c.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << c.number << ": "
            << std::left << std::setw(58) << c.title << " worst=" << std::scientific
            << std::setprecision(2) << c.worst;
  if (!note.empty()) std::cout << "  [" << note << "]";
  std::cout << "\n";
  for (const auto& d : c.details) std::cout << "        " << d << "\n";
}

using ScenarioSet = std::vector<std::pair<std::string, int>>;

const ScenarioSet kAllScenarios = {{"s0", 3}, {"s1", 2}, {"s1", 3}, {"s1", 4},
                                   {"s1q", 3}, {"s2", 2}, {"s2", 3}, {"s2", 4},
                                   {"s2b", 3}, {"s3", 3}};
const ScenarioSet kChargedScenarios = {{"s1", 2}, {"s1", 3}, {"s1", 4}, {"s1q", 3},
                                       {"s2", 3}, {"s3", 3}};
const ScenarioSet kInvolutive = {{"s1", 2}, {"s1", 3}, {"s1", 4}, {"s1q", 3}};

}  // namespace

int run_criterion(int num, SuiteCache& cache) {
  Criterion c;
  c.number = num;
  switch (num) {
    case 1: {
      c.title = "metric tensor equals the exact velocity hessian of K^2 (<= 1e-9)";
      for (auto [name, dim] : kAllScenarios)
        c.require(name + "/" + std::to_string(dim), resid(cache.get(name, dim, 0), "metric.hessian"),
                  1e-9);
      print_line(c);
      break;
    }
    case 2: {
      c.title = "metric reciprocity (<= 1e-10) and determinant identity (<= 1e-9)";
      for (auto [name, dim] : kAllScenarios) {
        const auto& rep = cache.get(name, dim, 0);
        c.require(name + " reciprocity", resid(rep, "metric.reciprocity"), 1e-10);
        c.require(name + " determinant", resid(rep, "metric.determinant"), 1e-9);
      }
      print_line(c);
      break;
    }
    case 3: {
      c.title = "Cartan norm (1e-10), tensor vs metric derivative (1e-9), contractions (1e-9)";
      for (auto [name, dim] : kChargedScenarios) {
        const auto& rep = cache.get(name, dim, 0);
        std::string tag = name + "/" + std::to_string(dim);
        c.require(tag + " norm", resid(rep, "cartan.norm"), 1e-10);
        c.require(tag + " hessian", resid(rep, "cartan.hessian"), 1e-9);
        c.require(tag + " shape contractions", resid(rep, "cartan.contractions"), 1e-9);
        c.require(tag + " axis contractions", resid(rep, "metric.b-contract"), 1e-9);
        c.require(tag + " inversion/alpha", resid(rep, "cartan.alpha"), 1e-9);
      }
      print_line(c);
      break;
    }
    case 4: {
      c.title = "indicatrix curvature closed form vs direct assembly + contractions (<= 1e-9)";
      for (auto [name, dim] : kChargedScenarios)
        c.require(name + "/" + std::to_string(dim),
                  resid(cache.get(name, dim, 0), "cartan.indicatrix"), 1e-9);
      print_line(c);
      break;
    }
    case 5: {
      c.title = "charge-derivative family matches finite differences in g (<= 1e-6)";
      for (auto [name, dim] : kChargedScenarios) {
        const auto& rep = cache.get(name, dim, 0);
        std::string tag = name + "/" + std::to_string(dim);
        for (const char* id : {"gderiv.K2", "gderiv.y", "gderiv.metric", "gderiv.cartan",
                               "gderiv.M", "gderiv.My-dg", "gderiv.Mhat"})
          c.require(tag + " " + id, resid(rep, id), 1e-6);
        c.require(tag + " gderiv.combination", resid(rep, "gderiv.combination"), 1e-9);
      }
      print_line(c);
      break;
    }
    case 6: {
      c.title = "spray two-route agreement (<= 1e-5) and homogeneity ladder (<= 1e-10)";
      for (auto [name, dim] : ScenarioSet{{"s0", 3}, {"s1", 3}, {"s1q", 3}, {"s2", 3}, {"s3", 3}}) {
        const auto& rep = cache.get(name, dim, 0);
        c.require(name + " two-route", resid(rep, "spray.two-route"), 1e-5);
        c.require(name + " homogeneity", resid(rep, "spray.homogeneity"), 1e-10);
      }
      print_line(c);
      break;
    }
    case 7: {
      c.title = "Landsberg scenario: Adot = 0 (1e-6), spray reduction; Berwald exact";
      const auto& s2 = cache.get("s2", 3, 0);
      c.require("s2 Adot", resid(s2, "dot.landsberg"), 1e-6);
      c.require("s2 reduction", resid(s2, "spray.reduction"), 1e-9);
      const auto& s2b = cache.get("s2b", 3, 0);
      c.require("s2b berwald reduction", resid(s2b, "spray.reduction"), 1e-12);
      const auto& s24 = cache.get("s2", 4, 0);
      c.require("s2/4 Adot", resid(s24, "dot.landsberg"), 1e-6);
      print_line(c);
      break;
    }
    case 8: {
      c.title = "involutive: closed A_i|j (1e-5), alphadot (1e-8), A-special fit (1e-6, 1e-8)";
      for (auto [name, dim] : kInvolutive) {
        const auto& rep = cache.get(name, dim, 0);
        std::string tag = name + "/" + std::to_string(dim);
        c.require(tag + " closed covariant derivative", resid(rep, "conn.c19"), 1e-5);
        c.require(tag + " alphadot", resid(rep, "dot.alpha"), 1e-8);
        c.require(tag + " fit residual", resid(rep, "aspecial.fit"), 1e-6);
        c.require(tag + " gamma_k = g_k/g", resid(rep, "aspecial.gamma"), 1e-8);
      }
      print_line(c);
      break;
    }
    case 9: {
      c.title = "skew hv-curvature proportional to indicatrix curvature, as printed (<= 1e-4)";
      for (auto [name, dim] : ScenarioSet{{"s1", 3}, {"s1", 4}}) {
        const auto& rep = cache.get(name, dim, 24);
        c.require(name + "/" + std::to_string(dim),
                  resid(rep, "curv.theorem21-printed"), 1e-4);
        // context: the corrected identity does hold
        c.require(name + " corrected identity", resid(rep, "curv.theorem21-corrected"), 1e-6);
      }
      print_line(c,
                 c.pass ? ""
                        : "expected failure: the printed reduction omits the charge-gradient x "
                          "Cartan skew terms; the corrected identity passes (see the decisions "
                          "ledger / README)");
      break;
    }
    case 10: {
      c.title = "curvature identities (1e-4), flat zero (1e-10), documented closed-form ledger";
      for (auto [name, dim] : ScenarioSet{{"s1", 3}, {"s1q", 3}, {"s2", 3}}) {
        const auto& rep = cache.get(name, dim, 24);
        std::string tag = name + "/" + std::to_string(dim);
        c.require(tag + " R y = 0", resid(rep, "curv.identity-yk"), 1e-4);
        c.require(tag + " R_km y = K R", resid(rep, "curv.identity-km"), 1e-4);
      }
      c.require("s3 flat zero", resid(cache.get("s3", 3, 24), "curv.flat-zero"), 1e-10);
      {
        const auto& rep = cache.get("s1q", 3, 24);
        c.require("s1q repaired closed curvature", resid(rep, "curv.c29-corrected"), 1e-5);
        c.require("s1q comparison recorded", resid(rep, "curv.c29-documented"), 1e-4);
        bool documented = true;
        bool any = false;
        for (const auto& d : rep.discrepancies)
          if (d.check_id == "curv.c29-documented") {
            any = true;
            if (d.note.empty()) documented = false;
          }
        if (!any || !documented) {
          c.pass = false;
          c.details.push_back("discrepancy ledger for the closed-form comparison is missing notes");
        }
      }
      print_line(c);
      break;
    }
    case 11: {
      c.title = "current: zero at vanishing involution scalar (1e-10); route agreement (1e-4)";
      c.require("s3 zero current", resid(cache.get("s3", 3, 24), "current.zero"), 1e-10);
      const auto& s1 = cache.get("s1", 3, 24);
      c.require("s1 route agreement", resid(s1, "current.routes"), 1e-4);
      print_line(c);
      break;
    }
    case 12: {
      c.title = "Riemannian limit: K = S, g_ij = a_ij, Cartan family = 0 (<= 1e-12)";
      c.require("s0", resid(cache.get("s0", 3, 0), "riemann.limit"), 1e-12);
      print_line(c);
      break;
    }
    case 13: {
      c.title = "geodesics: K-drift <= 1e-7 per unit parameter at dt = 1e-3; 4th-order step law";
      for (const char* name : {"s0", "s1", "s2", "s3"}) {
        Scenario sc = builtin_scenario(name, 3);
        BackgroundGeometry geom = sc.make_geometry();
        Vec<double> x0(3);
        SampleRng rng(2026);
        SamplePoint sp = sample_line_element(sc, geom, rng);
        BackgroundAt bg0 = eval_background(geom, x0);
        double S2 = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) S2 += sp.y[i] * bg0.a(i, j) * sp.y[j];
        Vec<double> y0(3);
        for (int i = 0; i < 3; ++i) y0[i] = sp.y[i] * 0.5 / std::sqrt(S2);
        GeodesicResult res = trace_geodesic(sc, geom, x0, y0, 1.0, 1e-3);
        c.require(std::string(name) + " drift", res.k_drift / std::max(res.exit_time, 1e-9),
                  1e-7);
        if (std::string(name) == "s1" || std::string(name) == "s2") {
          // measure the step law where truncation is above the rounding floor
          GeodesicResult r1 = trace_geodesic(sc, geom, x0, y0, 0.96, 0.32);
          GeodesicResult r2 = trace_geodesic(sc, geom, x0, y0, 0.96, 0.16);
          if (r2.k_drift > 1e-13) {
            double ratio = r1.k_drift / r2.k_drift;
            std::ostringstream os;
            os << name << " step-halving ratio = " << std::fixed << std::setprecision(2)
               << ratio;
            c.details.push_back(os.str());
            c.require(std::string(name) + " order-4 ratio (log2 within 4 +- 1)",
                      std::fabs(std::log2(ratio) - 4.0), 1.0);
          }
        }
      }
      print_line(c);
      break;
    }
    case 14: {
      c.title = "determinism: identical scenario and seed give a byte-identical report body";
      Scenario sc = builtin_scenario("s1", 3);
      sc.samples = 40;
      sc.curvature_samples = 4;
      sc.rank4_samples = 2;
      VerificationReport r1 = run_suite(sc);
#if !defined(_WIN32)
      setenv("FINSLEROID_THREADS", "1", 1);
#endif
      VerificationReport r2 = run_suite(sc);
#if !defined(_WIN32)
      unsetenv("FINSLEROID_THREADS");
#endif
      if (r1.body_json() != r2.body_json()) {
        c.pass = false;
        c.details.push_back("report bodies differ between runs");
      }
      print_line(c);
      break;
    }
    default:
      std::cerr << "unknown criterion " << num << "\n";
      return 1;
  }
  return c.pass ? 0 : 1;
}

int main(int argc, char** argv) {
  int only = -1;
  for (int i = 1; i < argc; ++i)
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[i + 1]);
  SuiteCache cache;
  int failures = 0;
  try {
    if (only > 0) {
      failures = run_criterion(only, cache);
    } else {
      for (int k = 1; k <= 14; ++k) failures += run_criterion(k, cache);
    }
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << "\n";
    return 99;
  }
  if (only <= 0)
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criterion(s) failed")
              << "\n";
  return failures;
}
