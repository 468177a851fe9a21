#pragma once

#include <string>
#include <vector>

namespace finsler {

struct CheckRecord {
  std::string id;
  std::string formula;     // human-readable statement of what was compared
  std::string kind;        // algebraic | dual | fd1 | fd2 | oneshot
  int samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int worst_element = -1;
  std::string status;      // pass | fail | skipped
  std::string note;        // reason when skipped; context when documented
};

struct Discrepancy {
  std::string check_id;
  std::string component;   // which projection or sub-block deviates
  double magnitude = 0.0;
  std::string note;        // non-empty = documented
};

struct VerificationReport {
  std::string schema = "finsleroid-report/1";
  std::string scenario_name;
  int dimension = 0;
  int samples = 0;
  unsigned long long seed = 0;
  std::vector<CheckRecord> checks;
  std::vector<Discrepancy> discrepancies;
  int passed = 0, failed = 0, skipped = 0;
  double runtime_ms = 0.0;  // excluded from the deterministic body

  bool all_pass() const { return failed == 0; }
  void finalize();  // fills the summary counters

  /// Deterministic body (scenario, checks, discrepancies, summary); identical
  /// scenario+seed must serialize byte-identically.
  std::string body_json() const;
  /// Full document: body plus timing.
  std::string to_json() const;
};

}  // namespace finsler
