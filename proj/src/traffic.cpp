#include "pima/traffic.hpp"

#include <algorithm>
#include <cstring>

namespace pima {

ArrivalBatch draw_arrivals(double rate_per_slot, SimTime interval_start, double interval_len,
                           RngStream& rng, int user) {
    ArrivalBatch batch;
    batch.user = user;
    if (rate_per_slot <= 0 || interval_len <= 0) return batch;
    int count = rng.next_poisson(rate_per_slot * interval_len);
    batch.times.reserve(count);
    for (int i = 0; i < count; ++i)
        batch.times.push_back(interval_start + rng.next_unit() * interval_len);
    std::sort(batch.times.begin(), batch.times.end());
    return batch;
}

std::uint64_t traffic_checksum(std::uint64_t seed, int n_users, double rate_per_user, int k) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over raw double bits
    auto feed = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 0x100000001b3ull;
        }
    };
    for (int n = 0; n < n_users; ++n) {
        ArrivalStream stream(rate_per_user, seed, user_traffic_stream(n));
        std::vector<SimTime> times;
        for (int i = 0; i < k; ++i) {
            SimTime t = stream.peek();
            times.clear();
            stream.pop_until(t + 1e-9, times);
            std::uint64_t bits;
            std::memcpy(&bits, &t, sizeof bits);
            feed(bits);
            if (times.empty()) break;  // zero rate: peek never advances
        }
    }
    return h;
}

}  // namespace pima
