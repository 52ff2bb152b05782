#pragma once

#include <string>
#include <vector>

#include "pima/core.hpp"
#include "pima/sim.hpp"

namespace pima {

struct SweepSpec {
    SimConfig base;
    std::vector<double> lambda_grid;
    std::vector<SchedulerKind> schedulers;
    std::vector<std::uint64_t> seeds;
    std::string output_path = "sweep.csv";

    void validate() const;  // throws ConfigError
};

struct SweepRow {
    std::string scheduler;
    int n_users = 0;
    double lambda_total = 0;
    int seed_count = 0;
    long frames = 0;
    double eta_mean = 0;
    double eta_ci95 = 0;
    double latency_ms_mean = 0;
    double latency_ms_ci95 = 0;
    long delivered = 0;
    long dropped = 0;
    bool stable = true;
    std::uint64_t traffic_checksum = 0;
};

// One cell: fixed (scheduler, lambda), aggregated over the seed list.
SweepRow run_cell(const SimConfig& base, SchedulerKind scheduler, double lambda_total,
                  const std::vector<std::uint64_t>& seeds);

// Cells run in parallel; the output order is the spec order (scheduler-major)
// regardless of thread scheduling.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = 0);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
void write_csv(const std::vector<SweepRow>& rows, const std::string& path);

// Self-contained matplotlib script plotting eta (fig2) or latency (fig3/fig4)
// versus lambda, one series per scheduler. Throws on an empty table.
void emit_plot_script(const std::vector<SweepRow>& rows, const std::string& figure,
                      const std::string& csv_path, const std::string& script_path);

// fig2 / fig3 / fig4 sweep presets matching the reference scenarios.
SweepSpec preset_spec(const std::string& name);

// Paper-style 10-point grid on [0.01, 0.5].
std::vector<double> default_lambda_grid();

}  // namespace pima
