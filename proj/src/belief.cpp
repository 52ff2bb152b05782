#include "pima/belief.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace pima {

PackedState pack_state(const std::vector<int>& levels) {
    PackedState s = 0;
    for (std::size_t u = 0; u < levels.size(); ++u)
        s = state_with_level(s, static_cast<int>(u), levels[u]);
    return s;
}

std::vector<int> unpack_state(PackedState s, int n_users) {
    std::vector<int> levels(n_users);
    for (int u = 0; u < n_users; ++u) levels[u] = state_level(s, u);
    return levels;
}

int active_count(PackedState s, int n_users) {
    int c = 0;
    for (int u = 0; u < n_users; ++u)
        if (state_level(s, u) > 0) ++c;
    return c;
}

Belief Belief::point_mass(int n_users, int capacity, PackedState s) {
    Belief b;
    b.n_users = n_users;
    b.capacity = capacity;
    b.support = {{s, 1.0}};
    return b;
}

double Belief::total_mass() const {
    double m = 0;
    for (const auto& [s, p] : support) m += p;
    return m;
}

void Belief::normalize() {
    double m = total_mass();
    if (m <= 0) throw ObservationImpossible("belief has zero total mass");
    for (auto& [s, p] : support) p /= m;
}

void Belief::prune(double eps) {
    if (eps > 0) {
        support.erase(std::remove_if(support.begin(), support.end(),
                                     [eps](const auto& e) { return e.second < eps; }),
                      support.end());
    }
    normalize();
}

void Belief::sort_support() {
    std::sort(support.begin(), support.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

double Belief::prob_of(PackedState s) const {
    for (const auto& [st, p] : support)
        if (st == s) return p;
    return 0.0;
}

std::vector<double> arrival_level_pmf(int current_level, double mean, int capacity) {
    std::vector<double> pmf(capacity + 1, 0.0);
    if (mean <= 0) {
        pmf[current_level] = 1.0;
        return pmf;
    }
    double p = std::exp(-mean);
    double tail = 1.0;
    for (int a = 0; current_level + a < capacity; ++a) {
        pmf[current_level + a] = p;
        tail -= p;
        p *= mean / (a + 1);
    }
    pmf[capacity] = std::max(tail, 0.0);  // overflow lumped at C
    return pmf;
}

namespace {

// Slot with exactly one active assigned user loses that user's head packet.
PackedState apply_departures(PackedState s, const Assignment& a, int n_users) {
    for (int l = 1; l <= a.l2; ++l) {
        int tx = -1;
        int count = 0;
        for (int u = 0; u < n_users; ++u)
            if (a.q[u] == l && state_level(s, u) > 0) {
                tx = u;
                ++count;
            }
        if (count == 1) s = state_with_level(s, tx, state_level(s, tx) - 1);
    }
    return s;
}

}  // namespace

std::vector<std::pair<PackedState, double>> transition_distribution(
    PackedState state, const Assignment& assignment, double arrival_mean_per_user, int capacity,
    int n_users, double prune_eps) {
    PackedState departed = apply_departures(state, assignment, n_users);

    // Product-form arrivals over users, depth-first with mass pruning.
    std::vector<std::vector<double>> pmfs(n_users);
    for (int u = 0; u < n_users; ++u)
        pmfs[u] = arrival_level_pmf(state_level(departed, u), arrival_mean_per_user, capacity);

    std::vector<std::pair<PackedState, double>> cur = {{0, 1.0}};
    std::vector<std::pair<PackedState, double>> next;
    for (int u = 0; u < n_users; ++u) {
        next.clear();
        for (const auto& [s, p] : cur) {
            const auto& pmf = pmfs[u];
            for (int j = 0; j <= capacity; ++j) {
                double q = pmf[j];
                if (q <= 0) continue;
                double np = p * q;
                if (prune_eps > 0 && np < prune_eps) continue;
                next.emplace_back(state_with_level(s, u, j), np);
            }
        }
        cur.swap(next);
    }
    return cur;
}

bool observation_compatible(PackedState s, const Assignment& a, const std::vector<std::uint8_t>& acks,
                            const std::set<int>& collided_slots, int n_users) {
    for (int l = 1; l <= a.l2; ++l) {
        int tx = -1;
        int count = 0;
        for (int u = 0; u < n_users; ++u)
            if (a.q[u] == l && state_level(s, u) > 0) {
                tx = u;
                ++count;
            }
        bool collided = collided_slots.count(l) > 0;
        if (collided) {
            if (count < 2) return false;
        } else if (count >= 2) {
            return false;
        } else if (count == 1) {
            if (!acks[tx]) return false;
        }
        // no ack may exist for a user that did not lone-transmit this slot
        for (int u = 0; u < n_users; ++u)
            if (a.q[u] == l && acks[u] && !(count == 1 && !collided && u == tx)) return false;
    }
    // users without a slot cannot be acked
    for (int u = 0; u < n_users; ++u)
        if (acks[u] && a.q[u] == 0) return false;
    return true;
}

Belief filter_update(const Belief& prior, const Assignment& prev_assignment, const Observation& obs,
                     double arrival_mean, double prune_eps) {
    const int n = prior.n_users;
    const int cap = prior.capacity;
    std::unordered_map<PackedState, double> acc;
    acc.reserve(prior.support.size() * 4);
    for (const auto& [state, p] : prior.support) {
        if (!observation_compatible(state, prev_assignment, obs.acks, obs.collided_slots, n)) continue;
        // Propagate only mass that can still matter after pruning.
        for (const auto& [succ, q] :
             transition_distribution(state, prev_assignment, arrival_mean, cap, n, prune_eps > 0 ? prune_eps * p : 0.0)) {
            if (active_count(succ, n) != obs.nu) continue;
            acc[succ] += p * q;
        }
    }
    Belief post;
    post.n_users = n;
    post.capacity = cap;
    post.frame = prior.frame + 1;
    post.support.assign(acc.begin(), acc.end());
    if (post.support.empty())
        throw ObservationImpossible("filter_update: no prior state is compatible with the observation");
    post.sort_support();
    post.prune(prune_eps);
    return post;
}

std::vector<double> activation_probabilities(const Belief& belief) {
    std::vector<double> phi(belief.n_users, 0.0);
    for (const auto& [s, p] : belief.support)
        for (int u = 0; u < belief.n_users; ++u)
            if (state_level(s, u) > 0) phi[u] += p;
    return phi;
}

double slot_success_probability(const Belief& belief, std::uint32_t slot_mask) {
    double p = 0;
    for (const auto& [s, w] : belief.support) {
        std::uint32_t act = activity_mask(s, belief.n_users) & slot_mask;
        if (act != 0 && (act & (act - 1)) == 0) p += w;  // exactly one bit set
    }
    return p;
}

double slot_success_probability(const Belief& belief, const Assignment& assignment, int slot) {
    std::uint32_t mask = 0;
    for (int u = 0; u < belief.n_users; ++u)
        if (assignment.q[u] == slot) mask |= 1u << u;
    return slot_success_probability(belief, mask);
}

}  // namespace pima
