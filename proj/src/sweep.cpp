#include "pima/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <thread>

#include "pima/metrics.hpp"
#include "pima/traffic.hpp"

namespace pima {

void SweepSpec::validate() const {
    if (lambda_grid.empty()) throw ConfigError("lambda_grid", "must be non-empty");
    for (double l : lambda_grid)
        if (l <= 0) throw ConfigError("lambda_grid", "values must be positive");
    if (schedulers.empty()) throw ConfigError("schedulers", "must be non-empty");
    if (seeds.empty()) throw ConfigError("seeds", "must be non-empty");
    for (SchedulerKind s : schedulers) {
        SimConfig probe = base;
        probe.scheduler = s;
        probe.validate();
    }
}

SweepRow run_cell(const SimConfig& base, SchedulerKind scheduler, double lambda_total,
                  const std::vector<std::uint64_t>& seeds) {
    std::vector<double> etas, latencies;
    long delivered = 0, dropped = 0;
    bool stable = true;
    for (std::uint64_t seed : seeds) {
        SimConfig cfg = base;
        cfg.scheduler = scheduler;
        cfg.total_rate = lambda_total;
        cfg.seed = seed;
        SingleRunResult r = run_single(cfg);
        if (!std::isnan(r.summary.avg_frame_efficiency)) etas.push_back(r.summary.avg_frame_efficiency);
        latencies.push_back(r.summary.avg_latency_ms);
        delivered += r.summary.delivered;
        dropped += r.summary.dropped;
        stable = stable && r.summary.stable;
    }
    CellStats eta = aggregate_mean_ci(etas);
    CellStats lat = aggregate_mean_ci(latencies);
    SweepRow row;
    row.scheduler = scheduler_name(scheduler);
    row.n_users = base.n_users;
    row.lambda_total = lambda_total;
    row.seed_count = static_cast<int>(seeds.size());
    row.frames = base.horizon_frames;
    row.eta_mean = etas.empty() ? std::nan("") : eta.mean;
    row.eta_ci95 = etas.empty() ? std::nan("") : eta.ci95;
    row.latency_ms_mean = lat.mean;
    row.latency_ms_ci95 = lat.ci95;
    row.delivered = delivered;
    row.dropped = dropped;
    row.stable = stable;
    // Scheduler-independent by construction: hashes the per-user traffic forks.
    row.traffic_checksum =
        traffic_checksum(seeds.front(), base.n_users, lambda_total / base.n_users);
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads) {
    spec.validate();
    struct Cell {
        SchedulerKind scheduler;
        double lambda;
    };
    std::vector<Cell> cells;
    for (SchedulerKind s : spec.schedulers)
        for (double l : spec.lambda_grid) cells.push_back({s, l});

    std::vector<SweepRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            rows[i] = run_cell(spec.base, cells[i].scheduler, cells[i].lambda, spec.seeds);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads - 1; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "scheduler,n_users,lambda_total,seed_count,frames,eta_mean,eta_ci95,"
        "latency_ms_mean,latency_ms_ci95,delivered,dropped,stable,traffic_checksum\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.6g,%d,%ld,%.6g,%.6g,%.6g,%.6g,%ld,%ld,%d,%016llx\n",
                      r.scheduler.c_str(), r.n_users, r.lambda_total, r.seed_count, r.frames,
                      r.eta_mean, r.eta_ci95, r.latency_ms_mean, r.latency_ms_ci95, r.delivered,
                      r.dropped, r.stable ? 1 : 0,
                      static_cast<unsigned long long>(r.traffic_checksum));
        out += buf;
    }
    return out;
}

void write_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << rows_to_csv(rows);
}

void emit_plot_script(const std::vector<SweepRow>& rows, const std::string& figure,
                      const std::string& csv_path, const std::string& script_path) {
    if (rows.empty()) throw std::runtime_error("emit_plot_script: empty result table");
    bool latency = figure != "fig2";
    std::string ylabel = latency ? "Avg. Packet Latency [ms]" : "Avg. Frame Efficiency";
    std::string ycol = latency ? "latency_ms_mean" : "eta_mean";
    std::string ycol_ci = latency ? "latency_ms_ci95" : "eta_ci95";

    std::ofstream f(script_path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + script_path);
    f << "#!/usr/bin/env python3\n"
         "import csv\n"
         "from collections import defaultdict\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n\n"
         "series = defaultdict(list)\n"
         "with open(" << std::quoted(csv_path) << ") as fh:\n"
         "    for row in csv.DictReader(fh):\n"
         "        for col in (\"lambda_total\", \"" << ycol << "\", \"" << ycol_ci << "\"):\n"
         "            if col not in row:\n"
         "                raise SystemExit(f\"missing column: {col}\")\n"
         "        y = float(row[\"" << ycol << "\"])\n"
         "        if y != y:\n"
         "            continue  # undefined metric for this scheme\n"
         "        series[row[\"scheduler\"]].append((float(row[\"lambda_total\"]), y,\n"
         "                                          float(row[\"" << ycol_ci << "\"])))\n\n"
         "plt.figure(figsize=(7, 5))\n"
         "for name, pts in series.items():\n"
         "    pts.sort()\n"
         "    xs, ys, cis = zip(*pts)\n"
         "    plt.errorbar(xs, ys, yerr=cis, marker=\"o\", capsize=2, label=name)\n"
         "plt.xlabel(\"Packet Generation Rate $\\\\Lambda$ [pkt/slot]\")\n"
         "plt.ylabel(" << std::quoted(ylabel) << ")\n"
         "plt.grid(True)\n"
         "plt.legend()\n"
         "plt.tight_layout()\n"
         "plt.savefig(" << std::quoted(figure + ".png") << ", dpi=150)\n"
         "print(\"wrote " << figure << ".png\")\n";
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.01 + i * (0.49 / 9.0));
    return grid;
}

SweepSpec preset_spec(const std::string& name) {
    SweepSpec spec;
    spec.lambda_grid = default_lambda_grid();
    spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    spec.base.slot_ms = 0.125;
    if (name == "fig2") {
        spec.base.n_users = 5;
        spec.base.pia_len = 0.1;
        spec.schedulers = {SchedulerKind::TDMA, SchedulerKind::PIMA, SchedulerKind::GFEO,
                           SchedulerKind::SGFEO};
        spec.output_path = "fig2.csv";
    } else if (name == "fig3") {
        spec.base.n_users = 5;
        spec.base.pia_len = 0.1;
        spec.schedulers = {SchedulerKind::TDMA, SchedulerKind::SALOHA, SchedulerKind::PIMA,
                           SchedulerKind::GFEO, SchedulerKind::SGFEO};
        spec.output_path = "fig3.csv";
    } else if (name == "fig4") {
        spec.base.n_users = 30;
        spec.base.pia_len = 0.25;
        spec.schedulers = {SchedulerKind::TDMA, SchedulerKind::SALOHA, SchedulerKind::PIMA,
                           SchedulerKind::SGFEO};
        spec.output_path = "fig4.csv";
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "' (expected fig2|fig3|fig4)");
    }
    return spec;
}

}  // namespace pima
