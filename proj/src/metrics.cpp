#include "pima/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pima {

void MetricsAccumulator::record_frame(const FrameResult& result) {
    if (result.nu_at_start <= 0) return;  // eta is conditioned on nu(t) > 0
    int successes = 0;
    for (const auto& o : result.outcomes)
        if (o.kind == SlotOutcome::Kind::Success) ++successes;
    eta_sum_ += successes / result.frame_len;
    ++eta_frames_;
}

void MetricsAccumulator::record_delivery(const Packet& packet) {
    if (!packet.delivered_at || *packet.delivered_at <= packet.generated_at)
        throw std::logic_error("record_delivery: delivery must follow generation");
    latency_sum_ms_ += (*packet.delivered_at - packet.generated_at) * slot_ms_;
    ++latency_samples_;
}

void MetricsAccumulator::record_queue_sample(double total_queue_len) {
    queue_series_.push_back(total_queue_len);
}

double MetricsAccumulator::mean_queue_len() const {
    if (queue_series_.empty()) return 0;
    return std::accumulate(queue_series_.begin(), queue_series_.end(), 0.0) / queue_series_.size();
}

bool stability_check(const std::vector<double>& queue_series, double frames_per_window,
                     double slope_threshold) {
    if (queue_series.size() < 2) return true;
    // Least-squares slope over the last half of the series.
    std::size_t start = queue_series.size() / 2;
    std::size_t m = queue_series.size() - start;
    if (m < 2) return true;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double x = static_cast<double>(i);
        double y = queue_series[start + i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = m * sxx - sx * sx;
    if (denom == 0) return true;
    double slope_per_window = (m * sxy - sx * sy) / denom;
    return slope_per_window / frames_per_window <= slope_threshold;
}

CellStats aggregate_mean_ci(const std::vector<double>& per_seed_values) {
    CellStats s;
    const std::size_t k = per_seed_values.size();
    if (k == 0) return s;
    s.mean = std::accumulate(per_seed_values.begin(), per_seed_values.end(), 0.0) / k;
    if (k >= 2) {
        double ss = 0;
        for (double v : per_seed_values) ss += (v - s.mean) * (v - s.mean);
        double sd = std::sqrt(ss / (k - 1));
        s.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(k));
    }
    return s;
}

}  // namespace pima
