#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pima/belief.hpp"
#include "pima/core.hpp"

namespace pima {

// Per-user activity evidence for the previous frame, as implied by a single
// observation (one-shot reconstruction, no filter history).
enum class ActivityClass : std::uint8_t {
    KnownActiveDeparted,  // acked: was active, head packet left
    KnownActiveForced,    // collision constraint pins the user active (no departure)
    KnownInactive,        // assigned to an idle slot or silent member of a success slot
    CollisionMember,      // in a collided slot; jointly >= min_active of the group
    Unconstrained,        // no evidence (first frame)
};

struct ActivityGroup {
    int slot = 0;                // originating slot id, informational
    std::vector<int> members;
    int min_active = 2;
};

// Uniform-over-compatible-states model of the previous frame plus the arrival
// statistics needed to push it one step forward.
struct CompatibleClassBelief {
    int n_users = 0;
    int capacity = 1;
    double arrival_mean = 0;     // lambda * L(t-1)
    std::vector<ActivityClass> cls;
    std::vector<ActivityGroup> groups;
    int prev_nu = -1;            // -1: unknown (all users Unconstrained)
    int budget = 0;              // prev-frame actives left for the groups

    double p_new() const;        // activation by arrival only
    double p_acked_active() const;
    // Time-t activity probability for users outside collision groups.
    double scalar_activity(int user) const;
};

CompatibleClassBelief sgfeo_reconstruct(const Observation& obs, int prev_nu, double arrival_mean,
                                        int capacity);

// Conditional success evaluator: builds the one-step-forward activity law of a
// CompatibleClassBelief and answers exactly-one-active queries conditioned on
// the observed total active count.
class ClassEvaluator {
public:
    ClassEvaluator(const CompatibleClassBelief& cb, int obs_nu);

    // P(exactly one user in t_mask active at frame t | total actives = obs_nu)
    double success_probability(std::uint32_t t_mask) const;
    // P(user active at frame t | total actives = obs_nu)
    double activity_posterior(int user) const;
    std::vector<double> activity_posteriors() const;

private:
    double success_uncached(std::uint32_t t_mask) const;

    const CompatibleClassBelief cb_;
    int obs_nu_;
    // Users of the same scalar class (and members of the same collision group)
    // are exchangeable, so the answer depends on t_mask only through per-bucket
    // counts; memoizing on that signature makes repeated scheduling queries cheap.
    mutable std::map<std::vector<int>, double> cache_;
};

double conditioned_success_dp(const CompatibleClassBelief& cb, int obs_nu,
                              const Assignment& assignment, int slot);
double conditioned_success_dp(const CompatibleClassBelief& cb, int obs_nu, std::uint32_t t_mask);

// Expands the class belief into an explicit buffer-state belief at frame t
// (compatible previous states x uniform levels, one transition step,
// nu-conditioned). Used to re-seed the exact filter after an
// ObservationImpossible. Requires n_users <= 16.
Belief belief_from_class(const CompatibleClassBelief& cb, const Assignment& prev_assignment,
                         int obs_nu, double prune_eps);

}  // namespace pima
