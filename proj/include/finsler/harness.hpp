#pragma once

#include "finsler/report.hpp"
#include "finsler/scenario.hpp"

namespace finsler {

/// Worker count for the sample sweep (env FINSLEROID_THREADS overrides).
int thread_count();

/// Run every applicable invariant and closed-form-vs-oracle check of the
/// engine over the scenario's deterministic sample set.
VerificationReport run_suite(const Scenario& sc);

/// JSON dump of one pack at a line element (CLI `eval`).
/// Selectors: line | kernel | metric | cartan | gderiv | spray | curvature | frame.
std::string eval_dump(const Scenario& sc, const Vec<double>& x, const Vec<double>& y,
                      const std::string& pack);

}  // namespace finsler
