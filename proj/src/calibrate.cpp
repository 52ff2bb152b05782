#include "pima/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pima/oracle.hpp"
#include "pima/schedulers.hpp"

namespace pima {
namespace calibrate {

namespace {

Assignment random_compact_assignment(int n_users, RngStream& rng) {
    // Random surjection of users onto 1..L2.
    int l2 = 1 + static_cast<int>(rng.next_unit() * n_users);
    l2 = std::min(l2, n_users);
    Assignment a = Assignment::none(n_users);
    a.l2 = l2;
    std::vector<int> users(n_users);
    for (int u = 0; u < n_users; ++u) users[u] = u;
    for (int i = 0; i < n_users; ++i)
        std::swap(users[i], users[i + static_cast<int>(rng.next_unit() * (n_users - i))]);
    for (int i = 0; i < n_users; ++i)
        a.q[users[i]] = i < l2 ? i + 1 : 1 + static_cast<int>(rng.next_unit() * l2);
    return a;
}

// Executes the slot semantics on a concrete state to derive the feedback the
// BS would have seen, plus the post-departure state.
void derive_feedback(PackedState state, const Assignment& a, int n_users,
                     std::vector<std::uint8_t>& acks, std::set<int>& collided,
                     PackedState& after_departure) {
    acks.assign(n_users, 0);
    collided.clear();
    after_departure = state;
    for (int l = 1; l <= a.l2; ++l) {
        int tx = -1, count = 0;
        for (int u = 0; u < n_users; ++u)
            if (a.q[u] == l && state_level(state, u) > 0) {
                tx = u;
                ++count;
            }
        if (count == 1) {
            acks[tx] = 1;
            after_departure = state_with_level(after_departure, tx, state_level(after_departure, tx) - 1);
        } else if (count >= 2) {
            collided.insert(l);
        }
    }
}

}  // namespace

FilterInstance random_filter_instance(int n_users, int capacity, RngStream& rng) {
    FilterInstance inst;
    const long n_states = static_cast<long>(std::pow(capacity + 1.0, n_users));

    // Random dense-ish prior.
    Belief prior;
    prior.n_users = n_users;
    prior.capacity = capacity;
    std::vector<int> levels(n_users, 0);
    for (long idx = 0; idx < n_states; ++idx) {
        long v = idx;
        for (int u = 0; u < n_users; ++u) {
            levels[u] = static_cast<int>(v % (capacity + 1));
            v /= (capacity + 1);
        }
        if (rng.next_unit() < 0.6) prior.support.emplace_back(pack_state(levels), rng.next_unit() + 1e-3);
    }
    if (prior.support.empty()) prior.support.emplace_back(0, 1.0);
    prior.normalize();
    inst.prior = prior;

    inst.assignment = random_compact_assignment(n_users, rng);
    inst.arrival_mean = rng.next_unit() * 0.8;

    // Sample a true state from the prior and play the frame forward so the
    // observation has positive probability.
    double u01 = rng.next_unit();
    PackedState truth = prior.support.back().first;
    double accp = 0;
    for (const auto& [s, p] : prior.support) {
        accp += p;
        if (u01 < accp) {
            truth = s;
            break;
        }
    }
    PackedState after;
    derive_feedback(truth, inst.assignment, n_users, inst.obs.acks, inst.obs.collided_slots, after);
    for (int u = 0; u < n_users; ++u) {
        int arrivals = rng.next_poisson(inst.arrival_mean);
        int lv = std::min(state_level(after, u) + arrivals, capacity);
        after = state_with_level(after, u, lv);
    }
    inst.obs.nu = active_count(after, n_users);
    inst.obs.prev_assignment = inst.assignment;
    inst.obs.prev_frame_len = inst.assignment.l2 + 0.1;
    return inst;
}

DpInstance random_dp_instance(int n_users, int capacity, RngStream& rng) {
    DpInstance inst;
    double arrival_mean = 0.05 + rng.next_unit() * 0.8;

    // Random previous frame: activity set and assignment, then real feedback.
    PackedState prev_state = 0;
    for (int u = 0; u < n_users; ++u)
        if (rng.next_bernoulli(0.5))
            prev_state = state_with_level(prev_state, u, 1 + static_cast<int>(rng.next_unit() * capacity));
    Assignment a = random_compact_assignment(n_users, rng);
    Observation obs;
    PackedState after;
    derive_feedback(prev_state, a, n_users, obs.acks, obs.collided_slots, after);
    obs.prev_assignment = a;
    obs.prev_frame_len = a.l2 + 0.1;
    int prev_nu = active_count(prev_state, n_users);

    inst.cb = sgfeo_reconstruct(obs, prev_nu, arrival_mean, capacity);

    // Forward-sample one frame of the class model for a reachable obs_nu.
    const double p_new = inst.cb.p_new();
    const double p_acked = inst.cb.p_acked_active();
    int nu = 0;
    for (int u = 0; u < n_users; ++u) {
        double p;
        if (obs.acks[u]) p = p_acked;
        else if (state_level(prev_state, u) > 0) p = 1.0;
        else p = p_new;
        if (rng.next_bernoulli(p)) ++nu;
    }
    inst.obs_nu = nu;

    int picks = 1 + static_cast<int>(rng.next_unit() * 3);
    for (int i = 0; i < picks; ++i)
        inst.t_mask |= 1u << static_cast<int>(rng.next_unit() * n_users);
    return inst;
}

Belief random_conditioned_belief(int n_users, int capacity, int nu, RngStream& rng) {
    Belief b;
    b.n_users = n_users;
    b.capacity = capacity;
    int k = 1 + static_cast<int>(rng.next_unit() * 8);
    std::set<PackedState> seen;
    for (int i = 0; i < k; ++i) {
        // random activity pattern with exactly nu actives
        std::vector<int> users(n_users);
        for (int u = 0; u < n_users; ++u) users[u] = u;
        for (int j = 0; j < nu; ++j)
            std::swap(users[j], users[j + static_cast<int>(rng.next_unit() * (n_users - j))]);
        PackedState s = 0;
        for (int j = 0; j < nu; ++j)
            s = state_with_level(s, users[j], 1 + static_cast<int>(rng.next_unit() * capacity));
        if (seen.insert(s).second) b.support.emplace_back(s, rng.next_unit() + 1e-3);
    }
    b.sort_support();
    b.normalize();
    return b;
}

SuiteResult filter_suite(int instances_n2, int instances_n3, double tol, std::uint64_t seed) {
    SuiteResult res{"filter sparse-vs-dense", true, ""};
    RngStream rng(seed, 0xf117e5);
    double worst = 0;
    auto run = [&](int n_users, int instances) {
        for (int i = 0; i < instances; ++i) {
            FilterInstance inst = random_filter_instance(n_users, 2, rng);
            Belief sparse = filter_update(inst.prior, inst.assignment, inst.obs, inst.arrival_mean, 0.0);
            Belief dense = oracle::enumerate_filter(inst.prior, inst.assignment, inst.obs, inst.arrival_mean);
            worst = std::max(worst, oracle::total_variation(sparse, dense));
        }
    };
    run(2, instances_n2);
    run(3, instances_n3);
    res.pass = worst <= tol;
    std::ostringstream os;
    os << "max total variation " << worst << " (tol " << tol << ")";
    res.detail = os.str();
    return res;
}

SuiteResult dp_suite(int instances, double tol, std::uint64_t seed) {
    SuiteResult res{"conditioned success dp-vs-brute", true, ""};
    RngStream rng(seed, 0xd9);
    double worst = 0;
    for (int i = 0; i < instances; ++i) {
        int n_users = 2 + static_cast<int>(rng.next_unit() * 5);  // 2..6
        int capacity = 1 + static_cast<int>(rng.next_unit() * 3);
        DpInstance inst = random_dp_instance(n_users, capacity, rng);
        double dp, brute;
        try {
            dp = conditioned_success_dp(inst.cb, inst.obs_nu, inst.t_mask);
            brute = oracle::brute_conditioned_success(inst.cb, inst.obs_nu, inst.t_mask);
        } catch (const ObservationImpossible&) {
            // must agree on infeasibility
            bool dp_throws = false, brute_throws = false;
            try { conditioned_success_dp(inst.cb, inst.obs_nu, inst.t_mask); } catch (const ObservationImpossible&) { dp_throws = true; }
            try { oracle::brute_conditioned_success(inst.cb, inst.obs_nu, inst.t_mask); } catch (const ObservationImpossible&) { brute_throws = true; }
            if (dp_throws != brute_throws) res.pass = false;
            continue;
        }
        worst = std::max(worst, std::abs(dp - brute));
    }
    if (worst > tol) res.pass = false;
    std::ostringstream os;
    os << "max abs diff " << worst << " (tol " << tol << ")";
    res.detail = os.str();
    return res;
}

SuiteResult greedy_suite(int instances, std::uint64_t seed) {
    SuiteResult res{"greedy-vs-exhaustive schedule", true, ""};
    RngStream rng(seed, 0x6f);
    const double l1 = 0.1;
    int equal = 0;
    double gap_sum = 0;
    double worst_violation = 0;
    for (int i = 0; i < instances; ++i) {
        int nu = 1 + static_cast<int>(rng.next_unit() * 4);
        Belief b = random_conditioned_belief(4, 2, nu, rng);
        Assignment greedy = gfeo_schedule(b, nu, l1, EfficiencyDenominator::FULL_FRAME);
        std::vector<double> probs(greedy.l2);
        for (int l = 1; l <= greedy.l2; ++l) probs[l - 1] = slot_success_probability(b, greedy, l);
        double eta_greedy = frame_efficiency(probs, l1, EfficiencyDenominator::FULL_FRAME);
        auto [best, eta_best] =
            oracle::exhaustive_schedule(b, l1, EfficiencyDenominator::FULL_FRAME);
        if (eta_greedy > eta_best + 1e-12) {
            res.pass = false;
            worst_violation = std::max(worst_violation, eta_greedy - eta_best);
        }
        double gap = (eta_best - eta_greedy) / std::max(eta_best, 1e-300);
        gap_sum += std::max(gap, 0.0);
        if (std::abs(eta_best - eta_greedy) <= 1e-12) ++equal;
    }
    std::ostringstream os;
    os << "optimal on " << equal << "/" << instances << ", mean relative gap "
       << gap_sum / instances;
    if (!res.pass) os << ", VIOLATION " << worst_violation;
    res.detail = os.str();
    return res;
}

SuiteResult partition_suite() {
    SuiteResult res{"pima-vs-exhaustive partition", true, ""};
    const double l1 = 0.1;
    double worst = 0;
    for (int n : {3, 5, 8}) {
        for (int nu = 1; nu <= n; ++nu) {
            Assignment a = pima_baseline_schedule(nu, n, l1, EfficiencyDenominator::FULL_FRAME);
            std::vector<double> probs(a.l2);
            std::vector<int> sizes(a.l2, 0);
            for (int u = 0; u < n; ++u) ++sizes[a.q[u] - 1];
            for (int l = 0; l < a.l2; ++l)
                probs[l] = hypergeometric_slot_success(sizes[l], n, nu);
            double eta = frame_efficiency(probs, l1, EfficiencyDenominator::FULL_FRAME);
            auto [best, eta_best] =
                oracle::exhaustive_partition(nu, n, l1, EfficiencyDenominator::FULL_FRAME);
            worst = std::max(worst, std::abs(eta - eta_best));
        }
    }
    res.pass = worst <= 1e-12;
    std::ostringstream os;
    os << "max eta gap " << worst;
    res.detail = os.str();
    return res;
}

std::vector<SuiteResult> run_all(std::uint64_t seed) {
    return {
        filter_suite(100, 20, 1e-12, seed),
        dp_suite(100, 1e-9, seed),
        greedy_suite(200, seed),
        partition_suite(),
    };
}

}  // namespace calibrate
}  // namespace pima
