#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pima {

// Simulation time in slot units (one slot = slot_ms milliseconds).
using SimTime = double;

enum class SchedulerKind { TDMA, SALOHA, PIMA, GFEO, SGFEO };
enum class EfficiencyDenominator { DT_ONLY, FULL_FRAME };
enum class LatencyReference { SLOT_START, SLOT_END };

const char* scheduler_name(SchedulerKind s);
std::optional<SchedulerKind> scheduler_from_name(const std::string& name);

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& field, const std::string& why)
        : std::runtime_error("config error in '" + field + "': " + why), field(field) {}
    std::string field;
};

struct SimConfig {
    int n_users = 5;
    double total_rate = 0.1;      // packets/slot, aggregate over users
    double slot_ms = 0.125;
    double pia_len = 0.1;         // slots
    int belief_capacity = 3;
    long horizon_frames = 200000;
    std::uint64_t seed = 1;
    SchedulerKind scheduler = SchedulerKind::GFEO;
    EfficiencyDenominator efficiency_denominator = EfficiencyDenominator::FULL_FRAME;
    std::optional<LatencyReference> latency_reference;  // unset: per-scheduler default
    double prune_epsilon = 1e-12;
    int tdma_queue_cap = 100;     // 0 = unbounded
    double warmup_fraction = 0.1;
    int gfeo_user_gate = 6;

    double per_user_rate() const { return total_rate / n_users; }
    LatencyReference effective_latency_reference() const;
    void validate() const;  // throws ConfigError naming the offending field
};

struct Packet {
    std::uint64_t id = 0;
    int user = 0;                           // 0-based
    SimTime generated_at = 0;
    std::optional<SimTime> delivered_at;
};

struct UserQueue {
    int user = 0;
    std::deque<Packet> packets;             // FIFO by generated_at
    int eligible_count = 0;                 // packets generated before current frame start

    bool active() const { return eligible_count > 0; }
    // Recomputes eligibility: packets with generated_at < frame_start are transmittable.
    void refresh_eligibility(SimTime frame_start);
};

struct Assignment {
    std::vector<int> q;   // per-user slot index in 1..l2, 0 = no DT sub-frame scheduled
    int l2 = 0;

    static Assignment none(int n_users) { return Assignment{std::vector<int>(n_users, 0), 0}; }
    void recompute_l2();
    // True when every slot index 1..l2 has at least one assigned user.
    bool compact() const;
};

struct SlotOutcome {
    enum class Kind { Idle, Success, Collision };
    Kind kind = Kind::Idle;
    std::vector<int> users;  // Success: exactly one; Collision: >= 2; Idle: empty

    static SlotOutcome idle() { return {}; }
    static SlotOutcome success(int user) { return {Kind::Success, {user}}; }
    static SlotOutcome collision(std::vector<int> users) { return {Kind::Collision, std::move(users)}; }
};

// BS-side observation at the start of a frame: active-user count from the PIA
// sub-frame plus the previous frame's feedback and the action that produced it.
struct Observation {
    int nu = 0;
    std::vector<std::uint8_t> acks;    // z(t-1), size N
    std::set<int> collided_slots;      // C(t-1), 1-based slot indices
    Assignment prev_assignment;        // q(t-1)
    SimTime prev_frame_len = 0;        // L(t-1)
};

inline SimTime frame_length(double l1, const Assignment& a) { return l1 + a.l2; }
inline double to_ms(SimTime t, double slot_ms) { return t * slot_ms; }

}  // namespace pima
