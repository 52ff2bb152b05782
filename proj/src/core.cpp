#include "pima/core.hpp"

#include <algorithm>

namespace pima {

const char* scheduler_name(SchedulerKind s) {
    switch (s) {
        case SchedulerKind::TDMA: return "TDMA";
        case SchedulerKind::SALOHA: return "SALOHA";
        case SchedulerKind::PIMA: return "PIMA";
        case SchedulerKind::GFEO: return "GFEO";
        case SchedulerKind::SGFEO: return "SGFEO";
    }
    return "?";
}

std::optional<SchedulerKind> scheduler_from_name(const std::string& name) {
    std::string up = name;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "TDMA") return SchedulerKind::TDMA;
    if (up == "SALOHA") return SchedulerKind::SALOHA;
    if (up == "PIMA") return SchedulerKind::PIMA;
    if (up == "GFEO") return SchedulerKind::GFEO;
    if (up == "SGFEO" || up == "S-GFEO") return SchedulerKind::SGFEO;
    return std::nullopt;
}

LatencyReference SimConfig::effective_latency_reference() const {
    if (latency_reference) return *latency_reference;
    switch (scheduler) {
        case SchedulerKind::TDMA:
        case SchedulerKind::SALOHA:
            return LatencyReference::SLOT_START;
        default:
            return LatencyReference::SLOT_END;
    }
}

void SimConfig::validate() const {
    if (n_users < 1) throw ConfigError("n_users", "must be positive");
    if (total_rate < 0) throw ConfigError("total_rate", "must be >= 0");
    if (slot_ms <= 0) throw ConfigError("slot_ms", "must be > 0");
    if (pia_len < 0) throw ConfigError("pia_len", "must be >= 0");
    if (belief_capacity < 1) throw ConfigError("belief_capacity", "must be >= 1");
    if (belief_capacity > 15) throw ConfigError("belief_capacity", "packed belief states support C <= 15");
    if (horizon_frames < 1) throw ConfigError("horizon_frames", "must be positive");
    if (prune_epsilon < 0 || prune_epsilon >= 1e-6) throw ConfigError("prune_epsilon", "must be in [0, 1e-6)");
    if (tdma_queue_cap < 0) throw ConfigError("tdma_queue_cap", "must be positive or 0 (unbounded)");
    if (warmup_fraction < 0 || warmup_fraction >= 1) throw ConfigError("warmup_fraction", "must be in [0, 1)");
    if (scheduler == SchedulerKind::GFEO && n_users > gfeo_user_gate)
        throw ConfigError("scheduler", "GFEO is gated to n_users <= " + std::to_string(gfeo_user_gate) +
                                           " (raise gfeo_user_gate to override)");
    if (scheduler == SchedulerKind::GFEO && n_users > 16)
        throw ConfigError("n_users", "the exact-filter scheduler supports at most 16 users");
    if (scheduler == SchedulerKind::SGFEO && n_users > 32)
        throw ConfigError("n_users", "the one-shot scheduler supports at most 32 users");
}

void UserQueue::refresh_eligibility(SimTime frame_start) {
    int n = 0;
    for (const auto& p : packets) {
        if (p.generated_at < frame_start) ++n;
        else break;  // FIFO by generated_at
    }
    eligible_count = n;
}

void Assignment::recompute_l2() {
    l2 = 0;
    for (int s : q) l2 = std::max(l2, s);
}

bool Assignment::compact() const {
    if (l2 == 0) {
        for (int s : q)
            if (s != 0) return false;
        return true;
    }
    std::vector<char> used(l2 + 1, 0);
    for (int s : q) {
        if (s < 0 || s > l2) return false;
        if (s > 0) used[s] = 1;
    }
    for (int l = 1; l <= l2; ++l)
        if (!used[l]) return false;
    return true;
}

}  // namespace pima
