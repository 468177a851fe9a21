#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/harness.hpp"
#include "json.hpp"

namespace {

finsler::Vec<double> to_vec(const std::vector<double>& v, int n) {
  if ((int)v.size() != n)
    throw std::runtime_error("expected " + std::to_string(n) + " components");
  finsler::Vec<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = v[i];
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsleroid-Finsler geometry engine and verification harness"};
  app.require_subcommand(1);

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "run the verification suite on a scenario");
  std::string v_scenario;
  int v_samples = -1, v_dim = 3;
  long long v_seed = -1;
  std::string v_report;
  bool v_strict = false;
  verify->add_option("--scenario", v_scenario, "builtin name or JSON file")->required();
  verify->add_option("--samples", v_samples, "line elements per scenario");
  verify->add_option("--seed", v_seed, "sample-set seed");
  verify->add_option("--dimension", v_dim, "dimension for builtin scenarios");
  verify->add_option("--report", v_report, "write the JSON report here");
  verify->add_flag("--strict", v_strict, "nonzero exit when any check is skipped");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "dump a tensor pack at a line element");
  std::string e_scenario, e_pack = "kernel";
  int e_dim = 3;
  std::vector<double> e_x, e_y;
  eval->add_option("--scenario", e_scenario)->required();
  eval->add_option("--dimension", e_dim);
  eval->add_option("--x", e_x, "base point")->required();
  eval->add_option("--y", e_y, "tangent vector")->required();
  eval->add_option("--pack", e_pack, "line|kernel|metric|cartan|gderiv|spray|curvature|frame");

  // ---- geodesic ----
  auto* geo = app.add_subcommand("geodesic", "integrate a spray geodesic");
  std::string g_scenario, g_out;
  int g_dim = 3;
  std::vector<double> g_x0, g_y0;
  double g_t1 = 1.0, g_dt = 1e-3;
  geo->add_option("--scenario", g_scenario)->required();
  geo->add_option("--dimension", g_dim);
  geo->add_option("--x0", g_x0, "initial point")->required();
  geo->add_option("--y0", g_y0, "initial velocity")->required();
  geo->add_option("--t1", g_t1, "integration time");
  geo->add_option("--dt", g_dt, "fixed step");
  geo->add_option("--out", g_out, "trajectory output path (JSON lines)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      finsler::Scenario sc = finsler::load_scenario(v_scenario, v_dim);
      if (v_samples > 0) sc.samples = v_samples;
      if (v_seed >= 0) sc.seed = (unsigned long long)v_seed;
      finsler::VerificationReport rep = finsler::run_suite(sc);
      for (const auto& c : rep.checks) {
        std::string mark = c.status == "pass" ? "PASS" : c.status == "fail" ? "FAIL" : "SKIP";
        std::cout << mark << "  " << std::left << std::setw(26) << c.id;
        if (c.status != "skipped")
          std::cout << " max_residual=" << std::scientific << std::setprecision(3)
                    << c.max_residual << " tol=" << c.tolerance << " samples=" << std::dec
                    << c.samples;
        else
          std::cout << " (" << c.note << ")";
        std::cout << "\n";
      }
      std::cout << "summary: " << rep.passed << " passed, " << rep.failed << " failed, "
                << rep.skipped << " skipped; " << std::fixed << std::setprecision(0)
                << rep.runtime_ms << " ms\n";
      if (!rep.discrepancies.empty()) {
        std::cout << "documented discrepancies:\n";
        for (const auto& d : rep.discrepancies)
          std::cout << "  " << d.check_id << " [" << d.component << "] magnitude="
                    << std::scientific << std::setprecision(3) << d.magnitude << "\n";
      }
      if (!v_report.empty()) {
        std::ofstream out(v_report);
        out << rep.to_json() << "\n";
      }
      if (rep.failed > 0) return 1;
      if (v_strict && rep.skipped > 0) return 1;
      return 0;
    }
    if (*eval) {
      finsler::Scenario sc = finsler::load_scenario(e_scenario, e_dim);
      std::cout << finsler::eval_dump(sc, to_vec(e_x, sc.dimension), to_vec(e_y, sc.dimension),
                                      e_pack)
                << "\n";
      return 0;
    }
    if (*geo) {
      finsler::Scenario sc = finsler::load_scenario(g_scenario, g_dim);
      finsler::BackgroundGeometry geom = sc.make_geometry();
      auto res = finsler::trace_geodesic(sc, geom, to_vec(g_x0, sc.dimension),
                                         to_vec(g_y0, sc.dimension), g_t1, g_dt);
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!g_out.empty()) {
        file.open(g_out);
        os = &file;
      }
      for (const auto& st : res.steps) {
        nlohmann::ordered_json rec;
        rec["t"] = st.t;
        rec["x"] = std::vector<double>();
        rec["dx"] = std::vector<double>();
        for (int i = 0; i < sc.dimension; ++i) {
          rec["x"].push_back(st.x[i]);
          rec["dx"].push_back(st.v[i]);
        }
        rec["K"] = st.K;
        *os << rec.dump() << "\n";
      }
      nlohmann::ordered_json fin;
      fin["exit"] = res.exit_reason;
      fin["exit_time"] = res.exit_time;
      fin["k_drift"] = res.k_drift;
      *os << fin.dump() << "\n";
      return res.exit_reason == "error" ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
