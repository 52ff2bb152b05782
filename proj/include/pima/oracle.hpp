#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pima/belief.hpp"
#include "pima/core.hpp"
#include "pima/rng.hpp"
#include "pima/sgfeo.hpp"

namespace pima {
namespace oracle {

struct OracleBudget {
    int max_users_assign = 4;
    int max_users_dp = 6;
    int max_capacity = 3;
    int max_l2 = 16;
    long max_states = 10'000'000;
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& why) : std::runtime_error(why) {}
};

// Enumerates every assignment up to slot relabeling (set partitions of the
// users) and returns a global frame-efficiency maximizer.
std::pair<Assignment, double> exhaustive_schedule(const Belief& belief, double l1,
                                                  EfficiencyDenominator mode,
                                                  const OracleBudget& budget = {});

// Dense reference filter over all (C+1)^N states, no pruning.
Belief enumerate_filter(const Belief& prior, const Assignment& prev_assignment,
                        const Observation& obs, double arrival_mean,
                        const OracleBudget& budget = {});

// All integer partitions of n_users into group sizes, hypergeometric success law.
std::pair<Assignment, double> exhaustive_partition(int nu, int n_users, double l1,
                                                   EfficiencyDenominator mode,
                                                   const OracleBudget& budget = {});

// Monte-Carlo estimate of the exactly-one-active probability for a slot.
double mc_success_estimate(const Belief& belief, std::uint32_t slot_mask, long samples,
                           RngStream& rng);
// Class-belief variant: rejection sampling conditioned on the observed count.
double mc_success_estimate(const CompatibleClassBelief& cb, int obs_nu, std::uint32_t slot_mask,
                           long samples, RngStream& rng);

// Brute-force counterpart of conditioned_success_dp (enumerates previous
// activity sets and all frame-t activity patterns). N <= budget.max_users_dp.
double brute_conditioned_success(const CompatibleClassBelief& cb, int obs_nu,
                                 std::uint32_t t_mask, const OracleBudget& budget = {});

double total_variation(const Belief& a, const Belief& b);

}  // namespace oracle
}  // namespace pima
