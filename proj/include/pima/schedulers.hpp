#pragma once

#include <vector>

#include "pima/belief.hpp"
#include "pima/core.hpp"
#include "pima/sgfeo.hpp"

namespace pima {

// eta for a tentative DT sub-frame: expected successes per slot (DT_ONLY,
// the literal definition) or per unit frame time including the PIA cost.
double frame_efficiency(const std::vector<double>& success_probs, double l1,
                        EfficiencyDenominator mode);

// Greedy frame-efficiency optimizer over the exact belief. Users sorted by
// decreasing activation probability; each is placed in the existing or new
// slot maximizing eta (ties: existing slot first, then lowest index).
Assignment gfeo_schedule(const Belief& belief, int nu, double l1, EfficiencyDenominator mode);

// Same greedy, slot success evaluated under the one-shot reconstructed class
// belief. Throws ObservationImpossible when the observation is infeasible;
// callers substitute the PIMA baseline assignment for the frame.
Assignment sgfeo_schedule(const Observation& obs, int prev_nu, int nu, double l1,
                          double arrival_mean, int capacity, EfficiencyDenominator mode);

// Count-only baseline: users are exchangeable, partitioned into L2 near-equal
// groups; L2 chosen to maximize eta under the hypergeometric success law.
Assignment pima_baseline_schedule(int nu, int n_users, double l1, EfficiencyDenominator mode);

// P(exactly one of a size-k group is active) when nu of n users are active
// uniformly at random.
double hypergeometric_slot_success(int group_size, int n_users, int nu);

Assignment tdma_schedule(int n_users);

struct SalohaStep {
    double transmit_prob;
    double backlog_estimate;
};
// Pseudo-Bayesian backlog update from ternary feedback.
SalohaStep saloha_step(double backlog_estimate, SlotOutcome::Kind feedback, double rate_per_slot);

}  // namespace pima
