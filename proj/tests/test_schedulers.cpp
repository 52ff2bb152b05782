#include <doctest.h>

#include <cmath>

#include "pima/oracle.hpp"
#include "pima/schedulers.hpp"

using namespace pima;

namespace {

Belief from_support(int n, int c, std::vector<std::pair<std::vector<int>, double>> entries) {
    Belief b;
    b.n_users = n;
    b.capacity = c;
    for (auto& [levels, p] : entries) b.support.emplace_back(pack_state(levels), p);
    b.sort_support();
    b.normalize();
    return b;
}

double assignment_eta(const Belief& b, const Assignment& a, double l1, EfficiencyDenominator mode) {
    std::vector<double> probs(a.l2);
    for (int l = 1; l <= a.l2; ++l) probs[l - 1] = slot_success_probability(b, a, l);
    return frame_efficiency(probs, l1, mode);
}

}  // namespace

TEST_CASE("frame efficiency in both denominators") {
    CHECK(frame_efficiency({1.0}, 0.1, EfficiencyDenominator::FULL_FRAME) ==
          doctest::Approx(1.0 / 1.1));
    CHECK(frame_efficiency({1.0}, 0.7, EfficiencyDenominator::DT_ONLY) == doctest::Approx(1.0));
    CHECK(frame_efficiency({0.8, 0.6}, 0.25, EfficiencyDenominator::FULL_FRAME) ==
          doctest::Approx(1.4 / 2.25));
}

TEST_CASE("hypergeometric slot success") {
    CHECK(hypergeometric_slot_success(5, 5, 1) == doctest::Approx(1.0));   // one active, whole group
    CHECK(hypergeometric_slot_success(1, 5, 5) == doctest::Approx(1.0));   // singleton, all active
    CHECK(hypergeometric_slot_success(3, 5, 5) == doctest::Approx(0.0));   // crowded, all active
    // exactly one of 2 chosen users active when 2 of 4 are: 2*C(2,1)/C(4,2)
    CHECK(hypergeometric_slot_success(2, 4, 2) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("count-only baseline boundary cases") {
    CHECK(pima_baseline_schedule(0, 5, 0.1, EfficiencyDenominator::FULL_FRAME).l2 == 0);

    Assignment one = pima_baseline_schedule(1, 5, 0.1, EfficiencyDenominator::FULL_FRAME);
    CHECK(one.l2 == 1);
    for (int s : one.q) CHECK(s == 1);

    Assignment all = pima_baseline_schedule(5, 5, 0.1, EfficiencyDenominator::FULL_FRAME);
    CHECK(all.l2 == 5);
    CHECK(all.compact());
}

TEST_CASE("baseline group sizes are near-equal and match exhaustive partitioning") {
    for (int nu = 1; nu <= 5; ++nu) {
        Assignment a = pima_baseline_schedule(nu, 5, 0.1, EfficiencyDenominator::FULL_FRAME);
        if (nu > 0) REQUIRE(a.l2 >= 1);
        std::vector<int> sizes(a.l2, 0);
        for (int s : a.q) ++sizes[s - 1];
        int mn = 5, mx = 0;
        for (int k : sizes) {
            mn = std::min(mn, k);
            mx = std::max(mx, k);
        }
        CHECK(mx - mn <= 1);

        std::vector<double> probs(a.l2);
        for (int l = 0; l < a.l2; ++l) probs[l] = hypergeometric_slot_success(sizes[l], 5, nu);
        double eta = frame_efficiency(probs, 0.1, EfficiencyDenominator::FULL_FRAME);
        auto [best, eta_best] = oracle::exhaustive_partition(nu, 5, 0.1,
                                                            EfficiencyDenominator::FULL_FRAME);
        CHECK(eta == doctest::Approx(eta_best).epsilon(1e-12));
    }
}

TEST_CASE("round-robin assignment") {
    Assignment a = tdma_schedule(5);
    CHECK(a.q == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(tdma_schedule(1).q == std::vector<int>{1});
}

TEST_CASE("pseudo-Bayesian backlog update") {
    SalohaStep s = saloha_step(1.0, SlotOutcome::Kind::Idle, 0.1);
    CHECK(s.transmit_prob == doctest::Approx(1.0));
    CHECK(s.backlog_estimate == doctest::Approx(0.2));

    s = saloha_step(4.0, SlotOutcome::Kind::Collision, 0.1);
    CHECK(s.transmit_prob == doctest::Approx(0.25));
    CHECK(s.backlog_estimate == doctest::Approx(4.0 + 1.0 / (std::exp(1.0) - 2.0) + 0.1));

    s = saloha_step(0.0, SlotOutcome::Kind::Success, 0.3);
    CHECK(s.transmit_prob == doctest::Approx(1.0));
    CHECK(s.backlog_estimate == doctest::Approx(0.6));
}

TEST_CASE("greedy: trivial cases") {
    Belief empty = Belief::point_mass(3, 2);
    CHECK(gfeo_schedule(empty, 0, 0.1, EfficiencyDenominator::FULL_FRAME).l2 == 0);

    Belief single = Belief::point_mass(1, 2, pack_state({1}));
    Assignment a = gfeo_schedule(single, 1, 0.1, EfficiencyDenominator::FULL_FRAME);
    CHECK(a.q == std::vector<int>{1});
}

TEST_CASE("greedy: negatively correlated users share a slot") {
    Belief neg = from_support(2, 1, {{{1, 0}, 0.5}, {{0, 1}, 0.5}});
    Assignment a = gfeo_schedule(neg, 1, 0.1, EfficiencyDenominator::FULL_FRAME);
    CHECK(a.l2 == 1);
    CHECK(a.q == std::vector<int>{1, 1});
    CHECK(assignment_eta(neg, a, 0.1, EfficiencyDenominator::FULL_FRAME) ==
          doctest::Approx(1.0 / 1.1));
}

TEST_CASE("greedy: all-active belief gets singleton slots") {
    Belief all = Belief::point_mass(3, 2, pack_state({1, 1, 1}));
    Assignment a = gfeo_schedule(all, 3, 0.1, EfficiencyDenominator::FULL_FRAME);
    CHECK(a.l2 == 3);
    CHECK(a.compact());
    CHECK(assignment_eta(all, a, 0.1, EfficiencyDenominator::FULL_FRAME) ==
          doctest::Approx(3.0 / 3.1));
}

TEST_CASE("greedy matches the exhaustive optimum on a correlated instance") {
    Belief b = from_support(3, 1, {{{1, 1, 0}, 0.5}, {{1, 0, 1}, 0.5}});
    Assignment greedy = gfeo_schedule(b, 2, 0.1, EfficiencyDenominator::FULL_FRAME);
    auto [best, eta_best] = oracle::exhaustive_schedule(b, 0.1, EfficiencyDenominator::FULL_FRAME);
    CHECK(assignment_eta(b, greedy, 0.1, EfficiencyDenominator::FULL_FRAME) ==
          doctest::Approx(eta_best).epsilon(1e-12));
}

TEST_CASE("greedy output is invariant under user relabeling symmetry") {
    Belief b = from_support(2, 1, {{{1, 0}, 0.5}, {{0, 1}, 0.5}});
    Assignment a = gfeo_schedule(b, 1, 0.1, EfficiencyDenominator::FULL_FRAME);
    // swapping the two (symmetric) users must give the same structure
    Belief swapped = from_support(2, 1, {{{0, 1}, 0.5}, {{1, 0}, 0.5}});
    Assignment a2 = gfeo_schedule(swapped, 1, 0.1, EfficiencyDenominator::FULL_FRAME);
    CHECK(a.l2 == a2.l2);
    CHECK(a.q == a2.q);
}

TEST_CASE("one-shot scheduler boundary cases") {
    Observation obs;
    obs.nu = 0;
    obs.acks.assign(3, 0);
    obs.prev_assignment = Assignment::none(3);
    obs.prev_frame_len = 0.1;
    Assignment a = sgfeo_schedule(obs, -1, 0, 0.1, 0.2, 4, EfficiencyDenominator::FULL_FRAME);
    CHECK(a.l2 == 0);

    obs.nu = 2;
    Assignment b = sgfeo_schedule(obs, -1, 2, 0.1, 0.2, 4, EfficiencyDenominator::FULL_FRAME);
    CHECK(b.l2 >= 1);
    CHECK(b.compact());
}
