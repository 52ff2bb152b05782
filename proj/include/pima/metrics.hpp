#pragma once

#include <cstdint>
#include <vector>

#include "pima/channel.hpp"
#include "pima/core.hpp"

namespace pima {

struct RunSummary {
    double avg_frame_efficiency = 0;  // conditioned on nu(t) > 0, post warm-up
    double avg_latency_ms = 0;        // delivered packets, post warm-up
    long eta_frames = 0;
    long latency_samples = 0;
    long generated = 0;               // whole-run conservation counts
    long delivered = 0;
    long dropped = 0;
    long residual_queued = 0;
    double mean_queue_len = 0;
    bool stable = true;
    SimConfig config;
};

// True when the trend of total mean queue length over the last half of the
// windowed series stays below the slope threshold (packets per frame).
bool stability_check(const std::vector<double>& queue_series, double frames_per_window,
                     double slope_threshold = 0.01);

// Per-run accumulator. The caller decides when warm-up ends and only records
// measurement-phase frames/deliveries; conservation counters cover everything.
class MetricsAccumulator {
public:
    explicit MetricsAccumulator(double slot_ms) : slot_ms_(slot_ms) {}

    void record_frame(const FrameResult& result);
    void record_delivery(const Packet& packet);
    void record_queue_sample(double total_queue_len);

    double eta_mean() const { return eta_frames_ ? eta_sum_ / eta_frames_ : 0.0; }
    double latency_ms_mean() const { return latency_samples_ ? latency_sum_ms_ / latency_samples_ : 0.0; }
    long eta_frames() const { return eta_frames_; }
    long latency_samples() const { return latency_samples_; }
    const std::vector<double>& queue_series() const { return queue_series_; }
    double mean_queue_len() const;

private:
    double slot_ms_;
    double eta_sum_ = 0;
    long eta_frames_ = 0;
    double latency_sum_ms_ = 0;
    long latency_samples_ = 0;
    std::vector<double> queue_series_;
};

// Cross-seed aggregation: means of per-seed means, CI from seed independence.
struct CellStats {
    double mean = 0;
    double ci95 = 0;  // half-width
};
CellStats aggregate_mean_ci(const std::vector<double>& per_seed_values);

}  // namespace pima
