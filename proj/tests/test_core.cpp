#include <doctest.h>

#include "pima/core.hpp"

using namespace pima;

TEST_CASE("frame_length adds the PIA cost to the DT length") {
    Assignment a = Assignment::none(2);
    a.q = {1, 1};
    a.l2 = 1;
    CHECK(frame_length(0.1, a) == doctest::Approx(1.1));

    Assignment empty = Assignment::none(2);
    CHECK(frame_length(0.1, empty) == doctest::Approx(0.1));

    Assignment wide = Assignment::none(7);
    wide.q = {1, 2, 3, 4, 5, 6, 7};
    wide.l2 = 7;
    CHECK(frame_length(0.25, wide) == doctest::Approx(7.25));
}

TEST_CASE("to_ms slot-to-millisecond conversion") {
    CHECK(to_ms(1.15, 0.125) == doctest::Approx(0.14375));
    CHECK(to_ms(0, 0.125) == 0.0);
    CHECK(to_ms(2.5, 0.125) == doctest::Approx(0.3125));
}

TEST_CASE("Assignment recompute_l2 and compactness") {
    Assignment a = Assignment::none(4);
    a.q = {2, 1, 2, 1};
    a.recompute_l2();
    CHECK(a.l2 == 2);
    CHECK(a.compact());

    a.q = {3, 1, 3, 1};  // slot 2 empty
    a.recompute_l2();
    CHECK(a.l2 == 3);
    CHECK(!a.compact());

    Assignment none = Assignment::none(3);
    CHECK(none.l2 == 0);
    CHECK(none.compact());
}

TEST_CASE("UserQueue eligibility counts only packets generated before frame start") {
    UserQueue q;
    q.packets.push_back({1, 0, 0.5, {}});
    q.packets.push_back({2, 0, 1.0, {}});
    q.packets.push_back({3, 0, 2.7, {}});
    q.refresh_eligibility(1.0);
    CHECK(q.eligible_count == 1);
    q.refresh_eligibility(2.8);
    CHECK(q.eligible_count == 3);
    CHECK(q.active());
    q.refresh_eligibility(0.1);
    CHECK(q.eligible_count == 0);
    CHECK(!q.active());
}

TEST_CASE("SimConfig validation names the offending field") {
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    auto field_of = [](SimConfig c) -> std::string {
        try {
            c.validate();
        } catch (const ConfigError& e) {
            return e.field;
        }
        return "";
    };

    SimConfig bad = cfg;
    bad.n_users = 0;
    CHECK(field_of(bad) == "n_users");

    bad = cfg;
    bad.prune_epsilon = 1e-5;
    CHECK(field_of(bad) == "prune_epsilon");

    bad = cfg;
    bad.warmup_fraction = 1.0;
    CHECK(field_of(bad) == "warmup_fraction");

    bad = cfg;
    bad.scheduler = SchedulerKind::GFEO;
    bad.n_users = 10;  // above the default gate
    CHECK(field_of(bad) == "scheduler");
    bad.gfeo_user_gate = 12;
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("scheduler names round-trip") {
    for (SchedulerKind k : {SchedulerKind::TDMA, SchedulerKind::SALOHA, SchedulerKind::PIMA,
                            SchedulerKind::GFEO, SchedulerKind::SGFEO}) {
        auto back = scheduler_from_name(scheduler_name(k));
        REQUIRE(back.has_value());
        CHECK(*back == k);
    }
    CHECK(scheduler_from_name("s-gfeo") == SchedulerKind::SGFEO);
    CHECK(!scheduler_from_name("csma").has_value());
}

TEST_CASE("latency reference defaults per scheduler, overridable") {
    SimConfig cfg;
    cfg.scheduler = SchedulerKind::GFEO;
    CHECK(cfg.effective_latency_reference() == LatencyReference::SLOT_END);
    cfg.scheduler = SchedulerKind::TDMA;
    CHECK(cfg.effective_latency_reference() == LatencyReference::SLOT_START);
    cfg.scheduler = SchedulerKind::SALOHA;
    CHECK(cfg.effective_latency_reference() == LatencyReference::SLOT_START);
    cfg.latency_reference = LatencyReference::SLOT_END;
    CHECK(cfg.effective_latency_reference() == LatencyReference::SLOT_END);
}
