#pragma once

#include <string>
#include <vector>

#include "pima/belief.hpp"
#include "pima/core.hpp"
#include "pima/rng.hpp"
#include "pima/sgfeo.hpp"

namespace pima {
namespace calibrate {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Randomized-but-reproducible instances shared by `calibrate` and the tests.
struct FilterInstance {
    Belief prior;
    Assignment assignment;
    Observation obs;
    double arrival_mean = 0;
};
FilterInstance random_filter_instance(int n_users, int capacity, RngStream& rng);

struct DpInstance {
    CompatibleClassBelief cb;
    int obs_nu = 0;
    std::uint32_t t_mask = 0;
};
DpInstance random_dp_instance(int n_users, int capacity, RngStream& rng);

// Random nu-conditioned sparse belief (active levels in 1..capacity).
Belief random_conditioned_belief(int n_users, int capacity, int nu, RngStream& rng);

SuiteResult filter_suite(int instances_n2, int instances_n3, double tol, std::uint64_t seed);
SuiteResult dp_suite(int instances, double tol, std::uint64_t seed);
SuiteResult greedy_suite(int instances, std::uint64_t seed);
SuiteResult partition_suite();

std::vector<SuiteResult> run_all(std::uint64_t seed = 42);

}  // namespace calibrate
}  // namespace pima
