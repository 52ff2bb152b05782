#pragma once

#include <functional>
#include <set>
#include <vector>

#include "pima/core.hpp"
#include "pima/rng.hpp"

namespace pima {

struct FrameResult {
    std::vector<SlotOutcome> outcomes;   // length l2
    std::vector<std::uint8_t> acks;      // z(t), size N
    std::set<int> collided_slots;        // C(t)
    int nu_at_start = 0;
    SimTime frame_start = 0;
    SimTime frame_len = 0;
    std::vector<Packet> delivered;       // packets removed from queues this frame
};

// nu(t): users with at least one eligible packet at frame start.
int count_active(const std::vector<UserQueue>& queues);

// Derives the per-user ack vector from slot outcomes alone.
std::vector<std::uint8_t> acks_from_outcomes(const std::vector<SlotOutcome>& outcomes, int n_users);

// Runs one PIMA frame: active users transmit in their assigned slot, a lone
// transmitter succeeds (head packet delivered), two or more collide, inactive
// users stay silent. Time advances by l1 + L2.
FrameResult execute_frame(const Assignment& assignment, std::vector<UserQueue>& queues,
                          SimTime frame_start, double l1, LatencyReference latency_ref);

// Frame-less slotted harness for SALOHA. The policy sees the previous slot's
// outcome and returns the per-user transmit probability for the next slot.
// Backlogged users (eligible packet present) transmit i.i.d. with that
// probability; delivered packets are stamped per latency_ref.
using SlotPolicy = std::function<double(const SlotOutcome& prev)>;
std::vector<SlotOutcome> run_slotted(const SlotPolicy& policy, std::vector<UserQueue>& queues,
                                     long horizon_slots, RngStream& rng,
                                     LatencyReference latency_ref = LatencyReference::SLOT_START,
                                     std::vector<Packet>* delivered = nullptr);

}  // namespace pima
