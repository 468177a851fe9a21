#include "finsler/report.hpp"

#include "json.hpp"

namespace finsler {

using ordered_json = nlohmann::ordered_json;

void VerificationReport::finalize() {
  passed = failed = skipped = 0;
  for (const auto& c : checks) {
    if (c.status == "pass") ++passed;
    else if (c.status == "fail") ++failed;
    else ++skipped;
  }
}

namespace {

ordered_json body_of(const VerificationReport& r) {
  ordered_json j;
  j["schema"] = r.schema;
  j["scenario"] = {{"name", r.scenario_name},
                   {"dimension", r.dimension},
                   {"samples", r.samples},
                   {"seed", r.seed}};
  j["checks"] = ordered_json::array();
  for (const auto& c : r.checks) {
    ordered_json cj;
    cj["id"] = c.id;
    cj["formula"] = c.formula;
    cj["kind"] = c.kind;
    cj["samples"] = c.samples;
    cj["max_residual"] = c.max_residual;
    cj["tolerance"] = c.tolerance;
    cj["worst_element"] = c.worst_element;
    cj["status"] = c.status;
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(cj);
  }
  j["discrepancies"] = ordered_json::array();
  for (const auto& d : r.discrepancies) {
    j["discrepancies"].push_back({{"check", d.check_id},
                                  {"component", d.component},
                                  {"magnitude", d.magnitude},
                                  {"note", d.note}});
  }
  j["summary"] = {{"total", (int)r.checks.size()},
                  {"passed", r.passed},
                  {"failed", r.failed},
                  {"skipped", r.skipped}};
  return j;
}

}  // namespace

std::string VerificationReport::body_json() const { return body_of(*this).dump(2); }

std::string VerificationReport::to_json() const {
  ordered_json j;
  j["body"] = body_of(*this);
  j["timing"] = {{"runtime_ms", runtime_ms}};
  return j.dump(2);
}

}  // namespace finsler
