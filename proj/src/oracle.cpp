#include "pima/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "pima/schedulers.hpp"

namespace pima {
namespace oracle {

namespace {

double success_under(const Belief& belief, std::uint32_t mask) {
    return slot_success_probability(belief, mask);
}

void partitions_rec(int remaining, int max_part, std::vector<int>& parts,
                    const std::function<void(const std::vector<int>&)>& visit) {
    if (remaining == 0) {
        visit(parts);
        return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        parts.push_back(p);
        partitions_rec(remaining - p, p, parts, visit);
        parts.pop_back();
    }
}

}  // namespace

std::pair<Assignment, double> exhaustive_schedule(const Belief& belief, double l1,
                                                  EfficiencyDenominator mode,
                                                  const OracleBudget& budget) {
    const int n = belief.n_users;
    if (n > budget.max_users_assign)
        throw BudgetExceeded("exhaustive_schedule: too many users");
    // Restricted growth strings enumerate set partitions up to slot relabeling.
    std::vector<int> rgs(n, 0);
    Assignment best = Assignment::none(n);
    double best_eta = -1;
    std::function<void(int, int)> rec = [&](int pos, int max_block) {
        if (pos == n) {
            int l2 = max_block + 1;
            if (l2 > budget.max_l2) return;
            std::vector<double> probs(l2, 0.0);
            std::vector<std::uint32_t> masks(l2, 0);
            for (int u = 0; u < n; ++u) masks[rgs[u]] |= 1u << u;
            for (int l = 0; l < l2; ++l) probs[l] = success_under(belief, masks[l]);
            double eta = frame_efficiency(probs, l1, mode);
            if (eta > best_eta) {
                best_eta = eta;
                best = Assignment::none(n);
                best.l2 = l2;
                for (int u = 0; u < n; ++u) best.q[u] = rgs[u] + 1;
            }
            return;
        }
        for (int b = 0; b <= max_block + 1; ++b) {
            rgs[pos] = b;
            rec(pos + 1, std::max(max_block, b));
        }
    };
    rec(1, 0);  // user 0 fixed to block 0
    return {best, best_eta};
}

Belief enumerate_filter(const Belief& prior, const Assignment& prev_assignment,
                        const Observation& obs, double arrival_mean, const OracleBudget& budget) {
    const int n = prior.n_users;
    const int cap = prior.capacity;
    double n_states = std::pow(cap + 1.0, n);
    if (n_states > 1e6) throw BudgetExceeded("enumerate_filter: state space too large");

    std::map<PackedState, double> acc;
    for (const auto& [state, p] : prior.support) {
        if (!observation_compatible(state, prev_assignment, obs.acks, obs.collided_slots, n)) continue;
        for (const auto& [succ, q] :
             transition_distribution(state, prev_assignment, arrival_mean, cap, n, 0.0)) {
            if (active_count(succ, n) != obs.nu) continue;
            acc[succ] += p * q;
        }
    }
    Belief post;
    post.n_users = n;
    post.capacity = cap;
    post.frame = prior.frame + 1;
    for (const auto& [s, p] : acc)
        if (p > 0) post.support.emplace_back(s, p);
    if (post.support.empty())
        throw ObservationImpossible("enumerate_filter: no prior state is compatible with the observation");
    post.normalize();
    return post;
}

std::pair<Assignment, double> exhaustive_partition(int nu, int n_users, double l1,
                                                   EfficiencyDenominator mode,
                                                   const OracleBudget& budget) {
    if (n_users > 12) throw BudgetExceeded("exhaustive_partition: too many users");
    Assignment best = Assignment::none(n_users);
    double best_eta = -1;
    if (nu == 0) return {best, 0.0};
    std::vector<int> parts;
    partitions_rec(n_users, n_users, parts, [&](const std::vector<int>& sizes) {
        std::vector<double> probs;
        probs.reserve(sizes.size());
        for (int k : sizes) probs.push_back(hypergeometric_slot_success(k, n_users, nu));
        double eta = frame_efficiency(probs, l1, mode);
        if (eta > best_eta) {
            best_eta = eta;
            best = Assignment::none(n_users);
            best.l2 = static_cast<int>(sizes.size());
            int u = 0;
            for (std::size_t g = 0; g < sizes.size(); ++g)
                for (int i = 0; i < sizes[g]; ++i) best.q[u++] = static_cast<int>(g) + 1;
        }
    });
    return {best, best_eta};
}

double mc_success_estimate(const Belief& belief, std::uint32_t slot_mask, long samples,
                           RngStream& rng) {
    std::vector<double> cdf;
    cdf.reserve(belief.support.size());
    double acc = 0;
    for (const auto& [s, p] : belief.support) {
        acc += p;
        cdf.push_back(acc);
    }
    long hits = 0;
    for (long i = 0; i < samples; ++i) {
        double u = rng.next_unit() * acc;
        std::size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (idx >= belief.support.size()) idx = belief.support.size() - 1;
        std::uint32_t act = activity_mask(belief.support[idx].first, belief.n_users) & slot_mask;
        if (act != 0 && (act & (act - 1)) == 0) ++hits;
    }
    return static_cast<double>(hits) / samples;
}

double mc_success_estimate(const CompatibleClassBelief& cb, int obs_nu, std::uint32_t slot_mask,
                           long samples, RngStream& rng) {
    const int n = cb.n_users;
    const double p_new = cb.p_new();
    const double p_acked = cb.p_acked_active();

    // Pre-enumerate joint group budgets with set-counting weights.
    std::vector<std::vector<int>> j_vectors;
    std::vector<double> j_weights;
    std::vector<int> js;
    std::function<void(std::size_t, int, double)> enumerate = [&](std::size_t g, int used, double w) {
        if (g == cb.groups.size()) {
            if (cb.prev_nu < 0 || used == cb.budget) {
                j_vectors.push_back(js);
                j_weights.push_back(w);
            }
            return;
        }
        int m = static_cast<int>(cb.groups[g].members.size());
        for (int j = cb.groups[g].min_active; j <= m; ++j) {
            double c = 1;
            for (int i = 1; i <= j; ++i) c = c * (m - j + i) / i;
            js.push_back(j);
            enumerate(g + 1, used + j, w * c);
            js.pop_back();
        }
    };
    enumerate(0, 0, 1.0);
    if (j_vectors.empty()) throw ObservationImpossible("mc_success_estimate: infeasible groups");
    std::vector<double> j_cdf(j_weights.size());
    double jw = 0;
    for (std::size_t i = 0; i < j_weights.size(); ++i) {
        jw += j_weights[i];
        j_cdf[i] = jw;
    }

    long hits = 0, kept = 0;
    while (kept < samples) {
        // previous-frame activity
        std::uint32_t prev = 0;
        for (int u = 0; u < n; ++u) {
            if (cb.cls[u] == ActivityClass::KnownActiveDeparted ||
                cb.cls[u] == ActivityClass::KnownActiveForced)
                prev |= 1u << u;
            else if (cb.cls[u] == ActivityClass::Unconstrained && rng.next_bernoulli(0.5))
                prev |= 1u << u;
        }
        double u01 = rng.next_unit() * jw;
        std::size_t pick = std::lower_bound(j_cdf.begin(), j_cdf.end(), u01) - j_cdf.begin();
        if (pick >= j_vectors.size()) pick = j_vectors.size() - 1;
        for (std::size_t g = 0; g < cb.groups.size(); ++g) {
            std::vector<int> members = cb.groups[g].members;
            // uniform j-subset via partial Fisher-Yates
            for (int i = 0; i < j_vectors[pick][g]; ++i) {
                std::size_t r = i + static_cast<std::size_t>(rng.next_unit() * (members.size() - i));
                std::swap(members[i], members[r]);
                prev |= 1u << members[i];
            }
        }
        // frame-t activity
        std::uint32_t cur = 0;
        for (int u = 0; u < n; ++u) {
            double p;
            if (cb.cls[u] == ActivityClass::KnownActiveDeparted) p = p_acked;
            else if (prev & (1u << u)) p = 1.0;
            else p = p_new;
            if (rng.next_bernoulli(p)) cur |= 1u << u;
        }
        if (__builtin_popcount(cur) != obs_nu) continue;  // condition on the count
        ++kept;
        std::uint32_t hit = cur & slot_mask;
        if (hit != 0 && (hit & (hit - 1)) == 0) ++hits;
    }
    return static_cast<double>(hits) / samples;
}

double brute_conditioned_success(const CompatibleClassBelief& cb, int obs_nu,
                                 std::uint32_t t_mask, const OracleBudget& budget) {
    const int n = cb.n_users;
    if (n > budget.max_users_dp) throw BudgetExceeded("brute_conditioned_success: too many users");
    const double p_new = cb.p_new();
    const double p_acked = cb.p_acked_active();

    std::uint32_t forced = 0, inactive = 0, constrained = 0, acked = 0;
    for (int u = 0; u < n; ++u) {
        switch (cb.cls[u]) {
            case ActivityClass::KnownActiveDeparted: acked |= 1u << u; break;
            case ActivityClass::KnownActiveForced: forced |= 1u << u; break;
            case ActivityClass::KnownInactive: inactive |= 1u << u; break;
            default: break;
        }
        if (cb.cls[u] != ActivityClass::Unconstrained) constrained |= 1u << u;
    }

    double num = 0, den = 0;
    for (std::uint32_t prev = 0; prev < (1u << n); ++prev) {
        if ((prev & (forced | acked)) != (forced | acked)) continue;
        if (prev & inactive) continue;
        bool ok = true;
        for (const auto& g : cb.groups) {
            int cnt = 0;
            for (int u : g.members)
                if (prev & (1u << u)) ++cnt;
            if (cnt < g.min_active) ok = false;
        }
        if (!ok) continue;
        if (cb.prev_nu >= 0 &&
            __builtin_popcount(prev & constrained) != cb.prev_nu)
            continue;
        // uniform over compatible sets; unconstrained users weigh 1/2 each way
        double w = 1.0;
        for (int u = 0; u < n; ++u)
            if (cb.cls[u] == ActivityClass::Unconstrained) w *= 0.5;

        for (std::uint32_t cur = 0; cur < (1u << n); ++cur) {
            double p = w;
            for (int u = 0; u < n; ++u) {
                double pu;
                if (acked & (1u << u)) pu = p_acked;
                else if (prev & (1u << u)) pu = 1.0;
                else pu = p_new;
                p *= (cur & (1u << u)) ? pu : 1.0 - pu;
                if (p == 0) break;
            }
            if (p == 0) continue;
            if (__builtin_popcount(cur) != obs_nu) continue;
            den += p;
            std::uint32_t hit = cur & t_mask;
            if (hit != 0 && (hit & (hit - 1)) == 0) num += p;
        }
    }
    if (den <= 0) throw ObservationImpossible("brute_conditioned_success: observed count unreachable");
    return num / den;
}

double total_variation(const Belief& a, const Belief& b) {
    std::map<PackedState, double> diff;
    for (const auto& [s, p] : a.support) diff[s] += p;
    for (const auto& [s, p] : b.support) diff[s] -= p;
    double tv = 0;
    for (const auto& [s, d] : diff) tv += std::abs(d);
    return tv / 2;
}

}  // namespace oracle
}  // namespace pima
