#include "pima/sim.hpp"

#include <cmath>
#include <utility>

#include "pima/belief.hpp"
#include "pima/channel.hpp"
#include "pima/schedulers.hpp"
#include "pima/sgfeo.hpp"
#include "pima/traffic.hpp"

namespace pima {

namespace {

struct TrafficFront {
    std::vector<ArrivalStream> streams;
    std::vector<SimTime> pending;
    std::uint64_t next_packet_id = 1;
    long generated = 0;

    TrafficFront(const SimConfig& cfg) {
        double rate = cfg.per_user_rate();
        for (int u = 0; u < cfg.n_users; ++u)
            streams.emplace_back(rate, cfg.seed, user_traffic_stream(u));
    }

    // Moves every packet generated before `now` into the queues; returns drops.
    long advance(std::vector<UserQueue>& queues, SimTime now, int queue_cap) {
        long dropped = 0;
        for (std::size_t u = 0; u < streams.size(); ++u) {
            pending.clear();
            streams[u].pop_until(now, pending);
            for (SimTime t : pending) {
                queues[u].packets.push_back(Packet{next_packet_id++, static_cast<int>(u), t, {}});
                ++generated;
                if (queue_cap > 0 && static_cast<int>(queues[u].packets.size()) > queue_cap) {
                    queues[u].packets.pop_front();  // drop-oldest
                    ++dropped;
                }
            }
            queues[u].eligible_count = static_cast<int>(queues[u].packets.size());
        }
        return dropped;
    }
};

long total_queue_len(const std::vector<UserQueue>& queues) {
    long n = 0;
    for (const auto& q : queues) n += static_cast<long>(q.packets.size());
    return n;
}

SingleRunResult run_frame_based(const SimConfig& cfg) {
    const int n = cfg.n_users;
    const double lambda_user = cfg.per_user_rate();
    const LatencyReference latref = cfg.effective_latency_reference();
    const long warmup_end = static_cast<long>(cfg.horizon_frames * cfg.warmup_fraction);
    const long window = std::max<long>(1, cfg.horizon_frames / 256);

    std::vector<UserQueue> queues(n);
    for (int u = 0; u < n; ++u) queues[u].user = u;
    TrafficFront traffic(cfg);
    MetricsAccumulator acc(cfg.slot_ms);
    RunDiagnostics diag;

    Belief belief = Belief::point_mass(n, cfg.belief_capacity);
    // Count-only baseline: users are exchangeable, so the group labels are
    // re-drawn every frame. A fixed mapping would keep collided users in the
    // same group frame after frame, which the count-only model cannot see.
    RngStream shuffle_rng(cfg.seed, 0x91a);
    std::vector<int> perm(n);
    Assignment prev_assignment = Assignment::none(n);
    std::vector<std::uint8_t> prev_acks(n, 0);
    std::set<int> prev_collided;
    SimTime prev_frame_len = 0;
    int prev_nu = -1;

    SimTime now = 0;
    long delivered = 0, dropped = 0;
    double window_queue_sum = 0;

    for (long t = 0; t < cfg.horizon_frames; ++t) {
        dropped += traffic.advance(queues, now, 0);
        int nu = count_active(queues);

        Observation obs;
        obs.nu = nu;
        obs.acks = prev_acks;
        obs.collided_slots = prev_collided;
        obs.prev_assignment = prev_assignment;
        obs.prev_frame_len = prev_frame_len;
        double arrival_mean = lambda_user * prev_frame_len;

        Assignment assignment;
        switch (cfg.scheduler) {
            case SchedulerKind::PIMA: {
                Assignment base =
                    pima_baseline_schedule(nu, n, cfg.pia_len, cfg.efficiency_denominator);
                assignment = base;
                if (base.l2 > 1) {
                    for (int u = 0; u < n; ++u) perm[u] = u;
                    for (int u = 0; u < n - 1; ++u) {
                        int j = u + static_cast<int>(shuffle_rng.next_unit() * (n - u));
                        std::swap(perm[u], perm[j]);
                    }
                    for (int u = 0; u < n; ++u) assignment.q[u] = base.q[perm[u]];
                }
                break;
            }
            case SchedulerKind::GFEO: {
                if (t > 0) {
                    try {
                        belief = filter_update(belief, prev_assignment, obs, arrival_mean,
                                               cfg.prune_epsilon);
                    } catch (const ObservationImpossible&) {
                        ++diag.filter_fallbacks;
                        CompatibleClassBelief cb =
                            sgfeo_reconstruct(obs, prev_nu, arrival_mean, cfg.belief_capacity);
                        belief = belief_from_class(cb, prev_assignment, nu, cfg.prune_epsilon);
                    }
                }
                diag.max_belief_mass_drift =
                    std::max(diag.max_belief_mass_drift, std::abs(belief.total_mass() - 1.0));
                for (const auto& [s, p] : belief.support)
                    if (active_count(s, n) != nu) ++diag.mismatched_support_states;
                assignment = gfeo_schedule(belief, nu, cfg.pia_len, cfg.efficiency_denominator);
                break;
            }
            case SchedulerKind::SGFEO: {
                if (t > 0) {
                    try {
                        assignment = sgfeo_schedule(obs, prev_nu, nu, cfg.pia_len, arrival_mean,
                                                    cfg.belief_capacity, cfg.efficiency_denominator);
                    } catch (const ObservationImpossible&) {
                        ++diag.filter_fallbacks;
                        assignment =
                            pima_baseline_schedule(nu, n, cfg.pia_len, cfg.efficiency_denominator);
                    }
                } else {
                    assignment = pima_baseline_schedule(nu, n, cfg.pia_len, cfg.efficiency_denominator);
                }
                break;
            }
            default:
                throw std::logic_error("run_frame_based: unsupported scheduler");
        }
        if (!assignment.compact()) ++diag.noncompact_assignments;

        FrameResult result = execute_frame(assignment, queues, now, cfg.pia_len, latref);
        delivered += static_cast<long>(result.delivered.size());
        if (t >= warmup_end) {
            acc.record_frame(result);
            for (const auto& pkt : result.delivered) acc.record_delivery(pkt);
            window_queue_sum += static_cast<double>(total_queue_len(queues));
            if ((t + 1) % window == 0) {
                acc.record_queue_sample(window_queue_sum / window);
                window_queue_sum = 0;
            }
        }

        prev_assignment = assignment;
        prev_acks = result.acks;
        prev_collided = result.collided_slots;
        prev_frame_len = result.frame_len;
        prev_nu = nu;
        now += result.frame_len;
    }

    SingleRunResult out;
    out.diagnostics = diag;
    out.summary.avg_frame_efficiency = acc.eta_mean();
    out.summary.avg_latency_ms = acc.latency_ms_mean();
    out.summary.eta_frames = acc.eta_frames();
    out.summary.latency_samples = acc.latency_samples();
    out.summary.generated = traffic.generated;
    out.summary.delivered = delivered;
    out.summary.dropped = dropped;
    out.summary.residual_queued = total_queue_len(queues);
    out.summary.mean_queue_len = acc.mean_queue_len();
    out.summary.stable = stability_check(acc.queue_series(), static_cast<double>(window));
    out.summary.config = cfg;
    return out;
}

SingleRunResult run_tdma(const SimConfig& cfg) {
    const int n = cfg.n_users;
    const LatencyReference latref = cfg.effective_latency_reference();
    const long warmup_end = static_cast<long>(cfg.horizon_frames * cfg.warmup_fraction);
    const long window = std::max<long>(1, cfg.horizon_frames / 256);

    std::vector<UserQueue> queues(n);
    for (int u = 0; u < n; ++u) queues[u].user = u;
    TrafficFront traffic(cfg);
    MetricsAccumulator acc(cfg.slot_ms);

    long delivered = 0, dropped = 0;
    double window_queue_sum = 0;

    for (long f = 0; f < cfg.horizon_frames; ++f) {
        SimTime frame_start = static_cast<SimTime>(f) * n;
        dropped += traffic.advance(queues, frame_start, cfg.tdma_queue_cap);
        int nu = count_active(queues);
        int successes = 0;
        std::vector<Packet> frame_delivered;
        for (int s = 0; s < n; ++s) {
            SimTime slot_start = frame_start + s;
            dropped += traffic.advance(queues, slot_start, cfg.tdma_queue_cap);
            UserQueue& q = queues[s];  // round-robin owner
            if (!q.packets.empty()) {
                Packet pkt = q.packets.front();
                q.packets.pop_front();
                --q.eligible_count;
                pkt.delivered_at =
                    latref == LatencyReference::SLOT_END ? slot_start + 1 : slot_start;
                frame_delivered.push_back(pkt);
                ++successes;
            }
        }
        delivered += static_cast<long>(frame_delivered.size());
        if (f >= warmup_end) {
            if (nu > 0) {
                FrameResult result;  // TDMA frame: N unit slots, no PIA cost
                result.nu_at_start = nu;
                result.frame_len = n;
                for (int i = 0; i < successes; ++i)
                    result.outcomes.push_back(SlotOutcome::success(0));
                acc.record_frame(result);
            }
            for (const auto& pkt : frame_delivered) acc.record_delivery(pkt);
            window_queue_sum += static_cast<double>(total_queue_len(queues));
            if ((f + 1) % window == 0) {
                acc.record_queue_sample(window_queue_sum / window);
                window_queue_sum = 0;
            }
        }
    }

    SingleRunResult out;
    out.summary.avg_frame_efficiency = acc.eta_mean();
    out.summary.avg_latency_ms = acc.latency_ms_mean();
    out.summary.eta_frames = acc.eta_frames();
    out.summary.latency_samples = acc.latency_samples();
    out.summary.generated = traffic.generated;
    out.summary.delivered = delivered;
    out.summary.dropped = dropped;
    out.summary.residual_queued = total_queue_len(queues);
    out.summary.mean_queue_len = acc.mean_queue_len();
    out.summary.stable = stability_check(acc.queue_series(), static_cast<double>(window));
    out.summary.config = cfg;
    return out;
}

SingleRunResult run_saloha(const SimConfig& cfg) {
    const int n = cfg.n_users;
    const LatencyReference latref = cfg.effective_latency_reference();
    const long total_slots = cfg.horizon_frames * n;  // duration comparable to TDMA
    const long warmup_end = static_cast<long>(total_slots * cfg.warmup_fraction);
    const long window = std::max<long>(1, total_slots / 256);

    std::vector<UserQueue> queues(n);
    for (int u = 0; u < n; ++u) queues[u].user = u;
    TrafficFront traffic(cfg);
    MetricsAccumulator acc(cfg.slot_ms);
    RngStream coins = rng_fork(cfg.seed, kSalohaCoinStream);

    double n_hat = 0;
    long delivered = 0;
    double window_queue_sum = 0;

    for (long s = 0; s < total_slots; ++s) {
        SimTime slot_start = static_cast<SimTime>(s);
        traffic.advance(queues, slot_start, 0);
        double p = std::min(1.0, 1.0 / std::max(n_hat, 1.0));
        std::vector<int> transmitters;
        for (int u = 0; u < n; ++u)
            if (queues[u].active() && coins.next_bernoulli(p)) transmitters.push_back(u);
        SlotOutcome::Kind outcome = SlotOutcome::Kind::Idle;
        if (transmitters.size() == 1) {
            outcome = SlotOutcome::Kind::Success;
            UserQueue& q = queues[transmitters.front()];
            Packet pkt = q.packets.front();
            q.packets.pop_front();
            --q.eligible_count;
            pkt.delivered_at = latref == LatencyReference::SLOT_END ? slot_start + 1 : slot_start;
            ++delivered;
            if (s >= warmup_end) acc.record_delivery(pkt);
        } else if (transmitters.size() >= 2) {
            outcome = SlotOutcome::Kind::Collision;
        }
        n_hat = saloha_step(n_hat, outcome, cfg.total_rate).backlog_estimate;
        if (s >= warmup_end) {
            window_queue_sum += static_cast<double>(total_queue_len(queues));
            if ((s + 1) % window == 0) {
                acc.record_queue_sample(window_queue_sum / window);
                window_queue_sum = 0;
            }
        }
    }

    SingleRunResult out;
    out.summary.avg_frame_efficiency = std::nan("");  // undefined for frame-less protocols
    out.summary.avg_latency_ms = acc.latency_ms_mean();
    out.summary.latency_samples = acc.latency_samples();
    out.summary.generated = traffic.generated;
    out.summary.delivered = delivered;
    out.summary.dropped = 0;
    out.summary.residual_queued = total_queue_len(queues);
    out.summary.mean_queue_len = acc.mean_queue_len();
    out.summary.stable = stability_check(acc.queue_series(), static_cast<double>(window));
    out.summary.config = cfg;
    return out;
}

}  // namespace

SingleRunResult run_single(const SimConfig& cfg) {
    cfg.validate();
    switch (cfg.scheduler) {
        case SchedulerKind::TDMA: return run_tdma(cfg);
        case SchedulerKind::SALOHA: return run_saloha(cfg);
        default: return run_frame_based(cfg);
    }
}

}  // namespace pima
