#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pima/core.hpp"

namespace pima {

// Joint buffer-load state, 4 bits per user (N <= 16, C <= 15).
using PackedState = std::uint64_t;

inline int state_level(PackedState s, int user) { return static_cast<int>((s >> (4 * user)) & 0xf); }
inline PackedState state_with_level(PackedState s, int user, int level) {
    return (s & ~(0xfull << (4 * user))) | (static_cast<PackedState>(level) << (4 * user));
}
PackedState pack_state(const std::vector<int>& levels);
std::vector<int> unpack_state(PackedState s, int n_users);

// Bitmask of users with a non-empty buffer.
inline std::uint32_t activity_mask(PackedState s, int n_users) {
    std::uint32_t m = 0;
    for (int u = 0; u < n_users; ++u)
        if (state_level(s, u) > 0) m |= 1u << u;
    return m;
}
int active_count(PackedState s, int n_users);

struct ObservationImpossible : std::runtime_error {
    explicit ObservationImpossible(const std::string& why) : std::runtime_error(why) {}
};

// Sparse distribution over buffer-load states, kept sorted by packed state.
struct Belief {
    int n_users = 0;
    int capacity = 0;
    long frame = 0;
    std::vector<std::pair<PackedState, double>> support;

    static Belief point_mass(int n_users, int capacity, PackedState s = 0);

    double total_mass() const;
    void normalize();
    void prune(double eps);  // drops entries below eps, then renormalizes
    void sort_support();
    double prob_of(PackedState s) const;
};

// One-step kernel: deterministic departures (one packet leaves every slot with
// exactly one active assigned user), then independent truncated-Poisson
// arrivals per user with overflow mass lumped at C.
std::vector<std::pair<PackedState, double>> transition_distribution(
    PackedState state, const Assignment& assignment, double arrival_mean_per_user, int capacity,
    int n_users, double prune_eps = 0.0);

// Truncated arrival pmf: resulting level j from current level k, Poisson(mean)
// arrivals, overflow lumped at capacity. Index by resulting level.
std::vector<double> arrival_level_pmf(int current_level, double mean, int capacity);

// True when state `s` at frame t-1 under `a` would have produced exactly the
// observed acks / collision set (idle elsewhere).
bool observation_compatible(PackedState s, const Assignment& a, const std::vector<std::uint8_t>& acks,
                            const std::set<int>& collided_slots, int n_users);

// Exact observation-conditioned forward step (GFEO belief). Throws
// ObservationImpossible when no compatible mass remains.
Belief filter_update(const Belief& prior, const Assignment& prev_assignment, const Observation& obs,
                     double arrival_mean, double prune_eps = 1e-12);

// phi_n = P(K_n > 0) under the belief.
std::vector<double> activation_probabilities(const Belief& belief);

// P(exactly one user in slot_mask is active), honoring all belief correlations.
double slot_success_probability(const Belief& belief, std::uint32_t slot_mask);
double slot_success_probability(const Belief& belief, const Assignment& assignment, int slot);

}  // namespace pima
