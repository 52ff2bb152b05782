#include <doctest.h>

#include <vector>

#include "pima/channel.hpp"
#include "pima/rng.hpp"

using namespace pima;

namespace {

// Queues with the given eligible packet counts, all generated before t=0.
std::vector<UserQueue> make_queues(const std::vector<int>& counts) {
    std::vector<UserQueue> queues(counts.size());
    std::uint64_t id = 1;
    for (std::size_t u = 0; u < counts.size(); ++u) {
        queues[u].user = static_cast<int>(u);
        for (int i = 0; i < counts[u]; ++i)
            queues[u].packets.push_back(
                {id++, static_cast<int>(u), -static_cast<double>(counts[u]) + i, {}});
        queues[u].refresh_eligibility(0.0);
    }
    return queues;
}

Assignment make_assignment(const std::vector<int>& q) {
    Assignment a;
    a.q = q;
    a.recompute_l2();
    return a;
}

}  // namespace

TEST_CASE("count_active counts non-empty queues") {
    CHECK(count_active(make_queues({0, 0, 0, 0, 0})) == 0);
    CHECK(count_active(make_queues({2, 0, 1, 0, 0})) == 2);
    CHECK(count_active(make_queues({1, 1, 1, 1, 1})) == 5);
}

TEST_CASE("lone active transmitter succeeds") {
    auto queues = make_queues({1, 0});
    FrameResult r = execute_frame(make_assignment({1, 1}), queues, 0.0, 0.1,
                                  LatencyReference::SLOT_END);
    REQUIRE(r.outcomes.size() == 1);
    CHECK(r.outcomes[0].kind == SlotOutcome::Kind::Success);
    CHECK(r.outcomes[0].users == std::vector<int>{0});
    CHECK(r.acks == std::vector<std::uint8_t>{1, 0});
    CHECK(r.collided_slots.empty());
    CHECK(queues[0].packets.empty());
    REQUIRE(r.delivered.size() == 1);
    CHECK(*r.delivered[0].delivered_at == doctest::Approx(0.0 + 0.1 + 1.0));
    CHECK(r.frame_len == doctest::Approx(1.1));
    CHECK(r.nu_at_start == 1);
}

TEST_CASE("two active users sharing a slot collide, queues untouched") {
    auto queues = make_queues({1, 1});
    FrameResult r = execute_frame(make_assignment({1, 1}), queues, 0.0, 0.1,
                                  LatencyReference::SLOT_END);
    REQUIRE(r.outcomes.size() == 1);
    CHECK(r.outcomes[0].kind == SlotOutcome::Kind::Collision);
    CHECK(r.outcomes[0].users == std::vector<int>{0, 1});
    CHECK(r.collided_slots == std::set<int>{1});
    CHECK(r.acks == std::vector<std::uint8_t>{0, 0});
    CHECK(queues[0].packets.size() == 1);
    CHECK(queues[1].packets.size() == 1);
    CHECK(r.delivered.empty());
}

TEST_CASE("mixed frame: success then collision") {
    auto queues = make_queues({1, 1, 1});
    FrameResult r = execute_frame(make_assignment({1, 2, 2}), queues, 0.0, 0.1,
                                  LatencyReference::SLOT_END);
    REQUIRE(r.outcomes.size() == 2);
    CHECK(r.outcomes[0].kind == SlotOutcome::Kind::Success);
    CHECK(r.outcomes[1].kind == SlotOutcome::Kind::Collision);
    CHECK(r.acks == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(r.collided_slots == std::set<int>{2});
}

TEST_CASE("inactive users stay silent; idle slots recorded") {
    auto queues = make_queues({0, 1});
    FrameResult r = execute_frame(make_assignment({1, 2}), queues, 5.0, 0.1,
                                  LatencyReference::SLOT_END);
    CHECK(r.outcomes[0].kind == SlotOutcome::Kind::Idle);
    CHECK(r.outcomes[1].kind == SlotOutcome::Kind::Success);
    // delivery at end of slot 2: 5.0 + 0.1 + 2
    CHECK(*r.delivered[0].delivered_at == doctest::Approx(7.1));
}

TEST_CASE("latency reference selects slot start vs end") {
    auto queues = make_queues({1});
    FrameResult r = execute_frame(make_assignment({1}), queues, 2.0, 0.25,
                                  LatencyReference::SLOT_START);
    CHECK(*r.delivered[0].delivered_at == doctest::Approx(2.0 + 0.25 + 1.0 - 1.0));
}

TEST_CASE("active user with sentinel slot in a non-empty frame is a contract violation") {
    auto queues = make_queues({1, 1});
    CHECK_THROWS_AS(execute_frame(make_assignment({0, 1}), queues, 0.0, 0.1,
                                  LatencyReference::SLOT_END),
                    std::logic_error);
}

TEST_CASE("acks_from_outcomes mirrors the success outcomes") {
    std::vector<SlotOutcome> outcomes = {SlotOutcome::success(2), SlotOutcome::idle(),
                                         SlotOutcome::collision({0, 1})};
    CHECK(acks_from_outcomes(outcomes, 4) == std::vector<std::uint8_t>{0, 0, 1, 0});
}

TEST_CASE("slotted harness: persistent transmitter drains its queue") {
    auto queues = make_queues({3});
    RngStream rng(1, 99);
    std::vector<Packet> delivered;
    auto outcomes = run_slotted([](const SlotOutcome&) { return 1.0; }, queues, 5, rng,
                                LatencyReference::SLOT_START, &delivered);
    REQUIRE(outcomes.size() == 5);
    CHECK(outcomes[0].kind == SlotOutcome::Kind::Success);
    CHECK(outcomes[1].kind == SlotOutcome::Kind::Success);
    CHECK(outcomes[2].kind == SlotOutcome::Kind::Success);
    CHECK(outcomes[3].kind == SlotOutcome::Kind::Idle);
    CHECK(delivered.size() == 3);
    CHECK(*delivered[0].delivered_at == doctest::Approx(0.0));
    CHECK(*delivered[1].delivered_at == doctest::Approx(1.0));
}

TEST_CASE("slotted harness: two persistent transmitters collide forever") {
    auto queues = make_queues({2, 2});
    RngStream rng(1, 99);
    auto outcomes = run_slotted([](const SlotOutcome&) { return 1.0; }, queues, 20, rng);
    for (const auto& o : outcomes) CHECK(o.kind == SlotOutcome::Kind::Collision);
}

TEST_CASE("slotted harness: coin-flip access hits the 2p(1-p) success rate") {
    // keep both users permanently backlogged
    std::vector<UserQueue> queues(2);
    for (int u = 0; u < 2; ++u) {
        queues[u].user = u;
        for (int i = 0; i < 200000; ++i)
            queues[u].packets.push_back({static_cast<std::uint64_t>(i), u, -1.0, {}});
        queues[u].refresh_eligibility(0.0);
    }
    RngStream rng(3, 99);
    auto outcomes = run_slotted([](const SlotOutcome&) { return 0.5; }, queues, 100000, rng);
    long successes = 0;
    for (const auto& o : outcomes)
        if (o.kind == SlotOutcome::Kind::Success) ++successes;
    CHECK(static_cast<double>(successes) / 100000 == doctest::Approx(0.5).epsilon(0.02));
}
