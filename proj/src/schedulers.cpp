#include "pima/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace pima {

namespace {

double denom(int l2, double l1, EfficiencyDenominator mode) {
    return mode == EfficiencyDenominator::DT_ONLY ? l2 : l1 + l2;
}

// Shared greedy loop; `success` maps a slot's user mask to its success
// probability under whichever belief the caller holds.
//
// A single incremental pass (place each user in the best existing-or-new slot)
// degenerates for near-exchangeable beliefs: early merges always look better
// than paying for a new slot, so most users end up piled into one slot. The
// frame length is therefore chosen by an outer scan: for each candidate DT
// length the users are placed greedily (decreasing activation probability,
// each into the slot maximizing the summed success, ties to the lowest index)
// into exactly that many slots, and the length with the best resulting
// efficiency wins, ties to the shorter frame.
Assignment greedy_assign(int n_users, const std::vector<double>& phi, double l1,
                         EfficiencyDenominator mode,
                         const std::function<double(std::uint32_t)>& success) {
    std::vector<int> order(n_users);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return phi[a] > phi[b]; });

    Assignment best = Assignment::none(n_users);
    double best_eta = -1;
    std::vector<std::uint32_t> masks;
    std::vector<double> probs;
    for (int l2 = 1; l2 <= n_users; ++l2) {
        masks.assign(l2, 0u);
        probs.assign(l2, 0.0);
        Assignment a = Assignment::none(n_users);
        double prob_sum = 0;
        for (int u : order) {
            std::uint32_t bit = 1u << u;
            int best_slot = 1;
            double best_gain = -1e300, best_prob = 0;
            for (int l = 1; l <= l2; ++l) {
                double p = success(masks[l - 1] | bit);
                if (p - probs[l - 1] > best_gain) {
                    best_gain = p - probs[l - 1];
                    best_slot = l;
                    best_prob = p;
                }
            }
            masks[best_slot - 1] |= bit;
            prob_sum += best_prob - probs[best_slot - 1];
            probs[best_slot - 1] = best_prob;
            a.q[u] = best_slot;
        }
        // Renumber around any slot left empty so the frame stays compact.
        std::vector<int> remap(l2 + 1, 0);
        int used = 0;
        for (int l = 1; l <= l2; ++l)
            if (masks[l - 1] != 0) remap[l] = ++used;
        a.l2 = used;
        if (used < l2)
            for (int u = 0; u < n_users; ++u) a.q[u] = remap[a.q[u]];
        double eta = prob_sum / denom(a.l2, l1, mode);
        if (eta > best_eta) {
            best_eta = eta;
            best = a;
        }
    }
    return best;
}

}  // namespace

double frame_efficiency(const std::vector<double>& success_probs, double l1,
                        EfficiencyDenominator mode) {
    double s = std::accumulate(success_probs.begin(), success_probs.end(), 0.0);
    return s / denom(static_cast<int>(success_probs.size()), l1, mode);
}

Assignment gfeo_schedule(const Belief& belief, int nu, double l1, EfficiencyDenominator mode) {
    if (nu == 0) return Assignment::none(belief.n_users);
    // Cache activity masks once; every success query is then a linear scan.
    std::vector<std::pair<std::uint32_t, double>> acts;
    acts.reserve(belief.support.size());
    for (const auto& [s, p] : belief.support)
        acts.emplace_back(activity_mask(s, belief.n_users), p);
    auto success = [&acts](std::uint32_t mask) {
        double p = 0;
        for (const auto& [act, w] : acts) {
            std::uint32_t hit = act & mask;
            if (hit != 0 && (hit & (hit - 1)) == 0) p += w;
        }
        return p;
    };
    return greedy_assign(belief.n_users, activation_probabilities(belief), l1, mode, success);
}

Assignment sgfeo_schedule(const Observation& obs, int prev_nu, int nu, double l1,
                          double arrival_mean, int capacity, EfficiencyDenominator mode) {
    const int n = static_cast<int>(obs.acks.size());
    if (nu == 0) return Assignment::none(n);
    CompatibleClassBelief cb = sgfeo_reconstruct(obs, prev_nu, arrival_mean, capacity);
    ClassEvaluator eval(cb, nu);
    auto success = [&eval](std::uint32_t mask) { return eval.success_probability(mask); };
    return greedy_assign(n, eval.activity_posteriors(), l1, mode, success);
}

double hypergeometric_slot_success(int group_size, int n_users, int nu) {
    // exactly one of the nu uniformly placed actives falls in the group
    auto binom = [](int n, int k) {
        if (k < 0 || k > n) return 0.0;
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    return group_size * binom(n_users - group_size, nu - 1) / binom(n_users, nu);
}

Assignment pima_baseline_schedule(int nu, int n_users, double l1, EfficiencyDenominator mode) {
    Assignment best = Assignment::none(n_users);
    if (nu == 0) return best;
    double best_eta = -1;
    for (int l2 = 1; l2 <= n_users; ++l2) {
        int base = n_users / l2;
        int rem = n_users % l2;
        std::vector<double> probs(l2);
        for (int g = 0; g < l2; ++g)
            probs[g] = hypergeometric_slot_success(base + (g < rem ? 1 : 0), n_users, nu);
        double eta = frame_efficiency(probs, l1, mode);
        if (eta > best_eta) {  // strict: ties keep the smaller L2
            best_eta = eta;
            best = Assignment::none(n_users);
            best.l2 = l2;
            int u = 0;
            for (int g = 0; g < l2; ++g) {
                int size = base + (g < rem ? 1 : 0);
                for (int i = 0; i < size; ++i) best.q[u++] = g + 1;
            }
        }
    }
    return best;
}

Assignment tdma_schedule(int n_users) {
    Assignment a = Assignment::none(n_users);
    a.l2 = n_users;
    for (int u = 0; u < n_users; ++u) a.q[u] = u + 1;
    return a;
}

SalohaStep saloha_step(double backlog_estimate, SlotOutcome::Kind feedback, double rate_per_slot) {
    double p = std::min(1.0, 1.0 / std::max(backlog_estimate, 1.0));
    double n_hat;
    if (feedback == SlotOutcome::Kind::Collision) {
        n_hat = backlog_estimate + 1.0 / (std::exp(1.0) - 2.0) + rate_per_slot;
    } else {
        n_hat = std::max(rate_per_slot, backlog_estimate - 1.0) + rate_per_slot;
    }
    return {p, n_hat};
}

}  // namespace pima
