#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pima/core.hpp"
#include "pima/rng.hpp"

namespace pima {

struct ArrivalBatch {
    int user = 0;
    std::vector<SimTime> times;  // sorted, within [interval_start, interval_end)
};

// Poisson count over the interval, then i.i.d. uniform placement, sorted.
ArrivalBatch draw_arrivals(double rate_per_slot, SimTime interval_start, double interval_len,
                           RngStream& rng, int user = 0);

// Lazy per-user Poisson process via exponential gaps. The realized arrival
// instants are a function of (seed, stream_id, rate) only, so runs that share
// traffic streams see identical packets regardless of how frame boundaries
// fall. Stream ids for user traffic are user_traffic_stream(n).
class ArrivalStream {
public:
    ArrivalStream(double rate_per_slot, std::uint64_t seed, std::uint64_t stream_id)
        : rate_(rate_per_slot), rng_(seed, stream_id) {
        next_ = rate_ > 0 ? rng_.next_exponential(rate_) : std::numeric_limits<double>::infinity();
    }

    // Appends all arrivals with time < until, advancing the stream.
    void pop_until(SimTime until, std::vector<SimTime>& out) {
        while (next_ < until) {
            out.push_back(next_);
            next_ += rng_.next_exponential(rate_);
        }
    }

    SimTime peek() const { return next_; }

private:
    double rate_;
    SimTime next_;
    RngStream rng_;
};

inline std::uint64_t user_traffic_stream(int user) { return 0x100 + static_cast<std::uint64_t>(user); }
constexpr std::uint64_t kSalohaCoinStream = 0x5a10;

// Hash of the first `k` arrival instants of every user's traffic fork; depends
// only on (seed, n_users, rate), never on the scheduler consuming the streams.
std::uint64_t traffic_checksum(std::uint64_t seed, int n_users, double rate_per_user, int k = 64);

}  // namespace pima
