#include "pima/channel.hpp"

#include <stdexcept>

namespace pima {

int count_active(const std::vector<UserQueue>& queues) {
    int nu = 0;
    for (const auto& q : queues)
        if (q.active()) ++nu;
    return nu;
}

std::vector<std::uint8_t> acks_from_outcomes(const std::vector<SlotOutcome>& outcomes, int n_users) {
    std::vector<std::uint8_t> acks(n_users, 0);
    for (const auto& o : outcomes)
        if (o.kind == SlotOutcome::Kind::Success) acks[o.users.front()] = 1;
    return acks;
}

FrameResult execute_frame(const Assignment& assignment, std::vector<UserQueue>& queues,
                          SimTime frame_start, double l1, LatencyReference latency_ref) {
    const int n = static_cast<int>(queues.size());
    FrameResult result;
    result.nu_at_start = count_active(queues);
    result.frame_start = frame_start;
    result.frame_len = frame_length(l1, assignment);
    result.outcomes.resize(assignment.l2);

    for (int u = 0; u < n; ++u) {
        if (queues[u].active() && assignment.q[u] == 0 && assignment.l2 > 0)
            throw std::logic_error("execute_frame: active user with sentinel slot 0 while L2 > 0");
    }

    for (int l = 1; l <= assignment.l2; ++l) {
        std::vector<int> transmitters;
        for (int u = 0; u < n; ++u)
            if (assignment.q[u] == l && queues[u].active()) transmitters.push_back(u);
        if (transmitters.empty()) {
            result.outcomes[l - 1] = SlotOutcome::idle();
        } else if (transmitters.size() == 1) {
            int u = transmitters.front();
            Packet pkt = queues[u].packets.front();
            queues[u].packets.pop_front();
            --queues[u].eligible_count;
            SimTime slot_end = frame_start + l1 + l;
            pkt.delivered_at = latency_ref == LatencyReference::SLOT_END ? slot_end : slot_end - 1;
            result.delivered.push_back(pkt);
            result.outcomes[l - 1] = SlotOutcome::success(u);
        } else {
            result.outcomes[l - 1] = SlotOutcome::collision(transmitters);
            result.collided_slots.insert(l);
        }
    }
    result.acks = acks_from_outcomes(result.outcomes, n);
    return result;
}

std::vector<SlotOutcome> run_slotted(const SlotPolicy& policy, std::vector<UserQueue>& queues,
                                     long horizon_slots, RngStream& rng,
                                     LatencyReference latency_ref, std::vector<Packet>* delivered) {
    const int n = static_cast<int>(queues.size());
    std::vector<SlotOutcome> outcomes;
    outcomes.reserve(horizon_slots);
    SlotOutcome prev = SlotOutcome::idle();
    for (long s = 0; s < horizon_slots; ++s) {
        double p = policy(prev);
        std::vector<int> transmitters;
        for (int u = 0; u < n; ++u)
            if (queues[u].active() && rng.next_bernoulli(p)) transmitters.push_back(u);
        SlotOutcome out;
        if (transmitters.size() == 1) {
            int u = transmitters.front();
            Packet pkt = queues[u].packets.front();
            queues[u].packets.pop_front();
            --queues[u].eligible_count;
            pkt.delivered_at = latency_ref == LatencyReference::SLOT_END
                                   ? static_cast<SimTime>(s + 1)
                                   : static_cast<SimTime>(s);
            if (delivered) delivered->push_back(pkt);
            out = SlotOutcome::success(u);
        } else if (transmitters.size() >= 2) {
            out = SlotOutcome::collision(transmitters);
        }
        outcomes.push_back(out);
        prev = outcomes.back();
    }
    return outcomes;
}

}  // namespace pima
