#include "pima/sgfeo.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace pima {

namespace {

constexpr int kYMax = 2;  // "two or more in T" is terminal for exactly-one queries

double binom_coeff(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<double> binom_pmf(int n, double p) {
    std::vector<double> pmf(n + 1);
    for (int k = 0; k <= n; ++k)
        pmf[k] = binom_coeff(n, k) * std::pow(p, k) * std::pow(1 - p, n - k);
    return pmf;
}

// Distribution over (count active at t, count active-in-T at t) for one
// collision group with m members, w of them in T, given j actives at t-1
// placed uniformly among the members. Weight is the number of such
// placements, i.e. sums to C(m, j).
std::vector<double> group_poly(int m, int w, int j, double p_new, int n_total) {
    const int stride = kYMax + 1;
    std::vector<double> poly((n_total + 1) * stride, 0.0);
    for (int h = std::max(0, j - (m - w)); h <= std::min(w, j); ++h) {
        double wh = binom_coeff(w, h) * binom_coeff(m - w, j - h);
        if (wh <= 0) continue;
        auto in_t_arrivals = binom_pmf(w - h, p_new);
        auto out_t_arrivals = binom_pmf(m - w - (j - h), p_new);
        for (std::size_t b1 = 0; b1 < in_t_arrivals.size(); ++b1) {
            int y = std::min<int>(h + static_cast<int>(b1), kYMax);
            for (std::size_t b2 = 0; b2 < out_t_arrivals.size(); ++b2) {
                int c = h + static_cast<int>(b1) + (j - h) + static_cast<int>(b2);
                poly[c * stride + y] += wh * in_t_arrivals[b1] * out_t_arrivals[b2];
            }
        }
    }
    return poly;
}

}  // namespace

double CompatibleClassBelief::p_new() const { return 1.0 - std::exp(-arrival_mean); }

double CompatibleClassBelief::p_acked_active() const {
    // level was uniform on {1..C}, one departure, then arrivals
    return static_cast<double>(capacity - 1) / capacity + p_new() / capacity;
}

double CompatibleClassBelief::scalar_activity(int user) const {
    switch (cls[user]) {
        case ActivityClass::KnownActiveDeparted: return p_acked_active();
        case ActivityClass::KnownActiveForced: return 1.0;
        case ActivityClass::KnownInactive: return p_new();
        case ActivityClass::Unconstrained: return 0.5 + 0.5 * p_new();
        case ActivityClass::CollisionMember: break;  // handled jointly
    }
    return -1.0;
}

CompatibleClassBelief sgfeo_reconstruct(const Observation& obs, int prev_nu, double arrival_mean,
                                        int capacity) {
    const int n = static_cast<int>(obs.acks.size());
    CompatibleClassBelief cb;
    cb.n_users = n;
    cb.capacity = capacity;
    cb.arrival_mean = arrival_mean;
    cb.prev_nu = prev_nu;
    cb.cls.assign(n, ActivityClass::Unconstrained);

    const Assignment& a = obs.prev_assignment;
    if (a.l2 == 0) {
        if (prev_nu == 0) {
            cb.cls.assign(n, ActivityClass::KnownInactive);
        } else if (prev_nu > 0) {
            // count known but nothing else: exactly prev_nu of all users, uniform
            ActivityGroup g;
            g.slot = 0;
            g.min_active = 0;
            for (int u = 0; u < n; ++u) g.members.push_back(u);
            for (int u = 0; u < n; ++u) cb.cls[u] = ActivityClass::CollisionMember;
            cb.groups.push_back(std::move(g));
            cb.budget = prev_nu;
        }
        return cb;
    }

    for (int l = 1; l <= a.l2; ++l) {
        std::vector<int> members;
        for (int u = 0; u < n; ++u)
            if (a.q[u] == l) members.push_back(u);
        bool collided = obs.collided_slots.count(l) > 0;
        if (collided) {
            if (members.size() < 2)
                throw ObservationImpossible("collision reported in a slot with fewer than two members");
            if (members.size() == 2) {
                // >= 2 active among 2 members pins both
                for (int u : members) cb.cls[u] = ActivityClass::KnownActiveForced;
            } else {
                for (int u : members) cb.cls[u] = ActivityClass::CollisionMember;
                cb.groups.push_back(ActivityGroup{l, members, 2});
            }
        } else {
            int acked = -1;
            for (int u : members)
                if (obs.acks[u]) acked = u;
            for (int u : members)
                cb.cls[u] = (u == acked) ? ActivityClass::KnownActiveDeparted : ActivityClass::KnownInactive;
        }
    }

    if (prev_nu >= 0) {
        int known_active = 0;
        for (int u = 0; u < n; ++u)
            if (cb.cls[u] == ActivityClass::KnownActiveDeparted ||
                cb.cls[u] == ActivityClass::KnownActiveForced)
                ++known_active;
        cb.budget = prev_nu - known_active;
        int min_sum = 0, max_sum = 0;
        for (const auto& g : cb.groups) {
            min_sum += g.min_active;
            max_sum += static_cast<int>(g.members.size());
        }
        if (cb.budget < min_sum || cb.budget > max_sum)
            throw ObservationImpossible("prev_nu inconsistent with forced/known activity classes");
    }
    return cb;
}

ClassEvaluator::ClassEvaluator(const CompatibleClassBelief& cb, int obs_nu)
    : cb_(cb), obs_nu_(obs_nu) {}

double ClassEvaluator::success_probability(std::uint32_t t_mask) const {
    // Signature: per-scalar-class count in T, then per-group count in T.
    std::vector<int> key(4 + cb_.groups.size(), 0);
    for (int u = 0; u < cb_.n_users; ++u) {
        if (!(t_mask & (1u << u)) || cb_.cls[u] == ActivityClass::CollisionMember) continue;
        switch (cb_.cls[u]) {
            case ActivityClass::KnownActiveDeparted: ++key[0]; break;
            case ActivityClass::KnownActiveForced: ++key[1]; break;
            case ActivityClass::KnownInactive: ++key[2]; break;
            default: ++key[3]; break;
        }
    }
    for (std::size_t g = 0; g < cb_.groups.size(); ++g)
        for (int u : cb_.groups[g].members)
            if (t_mask & (1u << u)) ++key[4 + g];
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double p = success_uncached(t_mask);
    cache_.emplace(std::move(key), p);
    return p;
}

double ClassEvaluator::success_uncached(std::uint32_t t_mask) const {
    const int n = cb_.n_users;
    const int stride = kYMax + 1;
    const double p_new = cb_.p_new();
    const bool budgeted = cb_.prev_nu >= 0;
    const int budget = budgeted ? cb_.budget : 0;

    // DP over (budget used, total actives at t, actives in T capped at 2).
    int bdim = 1;
    if (budgeted) {
        bdim = budget + 1;
    } else {
        for (const auto& g : cb_.groups) bdim += static_cast<int>(g.members.size());
    }
    std::vector<double> dp(bdim * (n + 1) * stride, 0.0);
    auto at = [&](std::vector<double>& v, int b, int c, int y) -> double& {
        return v[(b * (n + 1) + c) * stride + y];
    };
    at(dp, 0, 0, 0) = 1.0;
    int cmax = 0;

    for (const auto& g : cb_.groups) {
        int m = static_cast<int>(g.members.size());
        int w = 0;
        for (int u : g.members)
            if (t_mask & (1u << u)) ++w;
        std::vector<double> next(dp.size(), 0.0);
        for (int j = g.min_active; j <= m; ++j) {
            auto gp = group_poly(m, w, j, p_new, m);
            for (int b = 0; b + j < bdim; ++b) {
                if (budgeted && b + j > budget) break;
                for (int c = 0; c <= cmax; ++c) {
                    for (int y = 0; y <= kYMax; ++y) {
                        double base = at(dp, b, c, y);
                        if (base == 0) continue;
                        for (int cg = 0; cg <= m; ++cg) {
                            for (int yg = 0; yg <= kYMax; ++yg) {
                                double gv = gp[cg * stride + yg];
                                if (gv == 0) continue;
                                at(next, b + j, c + cg, std::min(y + yg, kYMax)) += base * gv;
                            }
                        }
                    }
                }
            }
        }
        dp.swap(next);
        cmax += m;
    }

    // Collapse the budget dimension: exact when conditioned, sum otherwise.
    std::vector<double> poly((n + 1) * stride, 0.0);
    for (int b = 0; b < bdim; ++b) {
        if (budgeted && b != budget) continue;
        for (int c = 0; c <= n; ++c)
            for (int y = 0; y <= kYMax; ++y) poly[c * stride + y] += at(dp, b, c, y);
    }

    // Scalar users: in-T users one at a time, out-of-T users batched per class.
    int counts_out[4] = {0, 0, 0, 0};
    const double probs[4] = {cb_.p_acked_active(), 1.0, p_new, 0.5 + 0.5 * p_new};
    auto class_index = [](ActivityClass c) {
        switch (c) {
            case ActivityClass::KnownActiveDeparted: return 0;
            case ActivityClass::KnownActiveForced: return 1;
            case ActivityClass::KnownInactive: return 2;
            default: return 3;
        }
    };
    auto shift_in_t = [&](double p) {
        std::vector<double> next((n + 1) * stride, 0.0);
        for (int c = 0; c <= n; ++c)
            for (int y = 0; y <= kYMax; ++y) {
                double v = poly[c * stride + y];
                if (v == 0) continue;
                if (1 - p > 0) next[c * stride + y] += v * (1 - p);
                if (p > 0 && c + 1 <= n) next[(c + 1) * stride + std::min(y + 1, kYMax)] += v * p;
            }
        poly.swap(next);
    };
    for (int u = 0; u < n; ++u) {
        if (cb_.cls[u] == ActivityClass::CollisionMember) continue;
        if (t_mask & (1u << u)) {
            shift_in_t(cb_.scalar_activity(u));
        } else {
            ++counts_out[class_index(cb_.cls[u])];
        }
    }
    for (int k = 0; k < 4; ++k) {
        if (counts_out[k] == 0) continue;
        auto pmf = binom_pmf(counts_out[k], probs[k]);
        std::vector<double> next((n + 1) * stride, 0.0);
        for (int c = 0; c <= n; ++c)
            for (int y = 0; y <= kYMax; ++y) {
                double v = poly[c * stride + y];
                if (v == 0) continue;
                for (std::size_t a = 0; a < pmf.size() && c + static_cast<int>(a) <= n; ++a)
                    if (pmf[a] > 0) next[(c + static_cast<int>(a)) * stride + y] += v * pmf[a];
            }
        poly.swap(next);
    }

    double num = poly[obs_nu_ * stride + 1];
    double den = 0;
    for (int y = 0; y <= kYMax; ++y) den += poly[obs_nu_ * stride + y];
    if (den <= 0)
        throw ObservationImpossible("no compatible state yields the observed active count");
    return num / den;
}

double ClassEvaluator::activity_posterior(int user) const {
    return success_probability(1u << user);
}

std::vector<double> ClassEvaluator::activity_posteriors() const {
    std::vector<double> phi(cb_.n_users);
    for (int u = 0; u < cb_.n_users; ++u) phi[u] = activity_posterior(u);
    return phi;
}

double conditioned_success_dp(const CompatibleClassBelief& cb, int obs_nu, std::uint32_t t_mask) {
    return ClassEvaluator(cb, obs_nu).success_probability(t_mask);
}

double conditioned_success_dp(const CompatibleClassBelief& cb, int obs_nu,
                              const Assignment& assignment, int slot) {
    std::uint32_t mask = 0;
    for (int u = 0; u < cb.n_users; ++u)
        if (assignment.q[u] == slot) mask |= 1u << u;
    return conditioned_success_dp(cb, obs_nu, mask);
}

Belief belief_from_class(const CompatibleClassBelief& cb, const Assignment& prev_assignment,
                         int obs_nu, double prune_eps) {
    const int n = cb.n_users;
    if (n > 16) throw std::logic_error("belief_from_class supports at most 16 users");
    const int cap = cb.capacity;

    // Enumerate compatible previous activity sets with weights.
    std::vector<std::pair<std::uint32_t, double>> sets = {{0u, 1.0}};
    for (int u = 0; u < n; ++u) {
        switch (cb.cls[u]) {
            case ActivityClass::KnownActiveDeparted:
            case ActivityClass::KnownActiveForced:
                for (auto& [m, w] : sets) m |= 1u << u;
                break;
            case ActivityClass::Unconstrained: {
                std::vector<std::pair<std::uint32_t, double>> next;
                next.reserve(sets.size() * 2);
                for (auto& [m, w] : sets) {
                    next.emplace_back(m, w * 0.5);
                    next.emplace_back(m | (1u << u), w * 0.5);
                }
                sets.swap(next);
                break;
            }
            default:
                break;  // KnownInactive stays 0, CollisionMember handled below
        }
    }
    for (const auto& g : cb.groups) {
        std::vector<std::pair<std::uint32_t, double>> next;
        int m = static_cast<int>(g.members.size());
        for (std::uint32_t sub = 0; sub < (1u << m); ++sub) {
            int j = __builtin_popcount(sub);
            if (j < g.min_active) continue;
            std::uint32_t member_mask = 0;
            for (int i = 0; i < m; ++i)
                if (sub & (1u << i)) member_mask |= 1u << g.members[i];
            for (auto& [base, w] : sets) next.emplace_back(base | member_mask, w);
        }
        sets.swap(next);
    }
    if (cb.prev_nu >= 0) {
        std::uint32_t budget_mask = 0;  // users counted against prev_nu (non-Unconstrained)
        for (int u = 0; u < n; ++u)
            if (cb.cls[u] != ActivityClass::Unconstrained) budget_mask |= 1u << u;
        sets.erase(std::remove_if(sets.begin(), sets.end(),
                                  [&](const auto& e) {
                                      return __builtin_popcount(e.first & budget_mask) != cb.prev_nu;
                                  }),
                   sets.end());
    }
    if (sets.empty()) throw ObservationImpossible("no previous activity set is compatible");

    // Levels: active users uniform on {1..C}; inactive at level 0. Push each
    // previous state through one transition, keep nu-compatible successors.
    std::unordered_map<PackedState, double> acc;
    for (const auto& [mask, set_weight] : sets) {
        std::vector<PackedState> states = {0};
        for (int u = 0; u < n; ++u) {
            if (!(mask & (1u << u))) continue;
            std::vector<PackedState> next;
            next.reserve(states.size() * cap);
            for (PackedState s : states)
                for (int lv = 1; lv <= cap; ++lv) next.push_back(state_with_level(s, u, lv));
            states.swap(next);
            if (states.size() > (1u << 22))
                throw std::logic_error("belief_from_class: state enumeration too large");
        }
        double level_weight = set_weight / static_cast<double>(states.size());
        for (PackedState s : states) {
            for (const auto& [succ, q] :
                 transition_distribution(s, prev_assignment, cb.arrival_mean, cap, n, prune_eps)) {
                if (active_count(succ, n) != obs_nu) continue;
                acc[succ] += level_weight * q;
            }
        }
    }

    Belief b;
    b.n_users = n;
    b.capacity = cap;
    b.support.assign(acc.begin(), acc.end());
    if (b.support.empty())
        throw ObservationImpossible("belief_from_class: observed active count unreachable");
    b.sort_support();
    b.prune(prune_eps);
    return b;
}

}  // namespace pima
