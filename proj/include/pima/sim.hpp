#pragma once

#include "pima/core.hpp"
#include "pima/metrics.hpp"

namespace pima {

// Extra diagnostics tracked during a run (belief-scheduler invariants).
struct RunDiagnostics {
    double max_belief_mass_drift = 0;   // max |1 - total mass| after any filter step
    long mismatched_support_states = 0; // support states whose active count != nu
    long noncompact_assignments = 0;    // emitted assignments with an empty slot
    long filter_fallbacks = 0;          // ObservationImpossible recoveries
};

struct SingleRunResult {
    RunSummary summary;
    RunDiagnostics diagnostics;
};

// One seed, one scheduler, full horizon. Deterministic given the config.
SingleRunResult run_single(const SimConfig& cfg);

}  // namespace pima
