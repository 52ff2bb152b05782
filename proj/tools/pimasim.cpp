// pimasim: run a single simulation or a sweep over packet generation rates,
// or cross-check the analytic machinery against brute-force references.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pima/calibrate.hpp"
#include "pima/core.hpp"
#include "pima/sim.hpp"
#include "pima/sweep.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitCalibrationMismatch = 3;

void apply_sim_config_json(const json& j, pima::SimConfig& cfg) {
    if (j.contains("n_users")) cfg.n_users = j.at("n_users").get<int>();
    if (j.contains("total_rate")) cfg.total_rate = j.at("total_rate").get<double>();
    if (j.contains("slot_ms")) cfg.slot_ms = j.at("slot_ms").get<double>();
    if (j.contains("pia_len")) cfg.pia_len = j.at("pia_len").get<double>();
    if (j.contains("belief_capacity")) cfg.belief_capacity = j.at("belief_capacity").get<int>();
    if (j.contains("horizon_frames")) cfg.horizon_frames = j.at("horizon_frames").get<long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("prune_epsilon")) cfg.prune_epsilon = j.at("prune_epsilon").get<double>();
    if (j.contains("tdma_queue_cap")) cfg.tdma_queue_cap = j.at("tdma_queue_cap").get<int>();
    if (j.contains("warmup_fraction")) cfg.warmup_fraction = j.at("warmup_fraction").get<double>();
    if (j.contains("gfeo_user_gate")) cfg.gfeo_user_gate = j.at("gfeo_user_gate").get<int>();
    if (j.contains("scheduler")) {
        std::string name = j.at("scheduler").get<std::string>();
        auto kind = pima::scheduler_from_name(name);
        if (!kind) throw pima::ConfigError("scheduler", "unknown scheduler '" + name + "'");
        cfg.scheduler = *kind;
    }
    if (j.contains("efficiency_denominator")) {
        std::string v = j.at("efficiency_denominator").get<std::string>();
        if (v == "dt_only") cfg.efficiency_denominator = pima::EfficiencyDenominator::DT_ONLY;
        else if (v == "full_frame") cfg.efficiency_denominator = pima::EfficiencyDenominator::FULL_FRAME;
        else throw pima::ConfigError("efficiency_denominator", "expected dt_only|full_frame");
    }
    if (j.contains("latency_reference")) {
        std::string v = j.at("latency_reference").get<std::string>();
        if (v == "slot_start") cfg.latency_reference = pima::LatencyReference::SLOT_START;
        else if (v == "slot_end") cfg.latency_reference = pima::LatencyReference::SLOT_END;
        else throw pima::ConfigError("latency_reference", "expected slot_start|slot_end");
    }
}

pima::SweepSpec spec_from_json(const json& j) {
    pima::SweepSpec spec;
    if (j.contains("base")) apply_sim_config_json(j.at("base"), spec.base);
    if (j.contains("lambda_grid")) spec.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("output_path")) spec.output_path = j.at("output_path").get<std::string>();
    if (j.contains("schedulers")) {
        for (const auto& entry : j.at("schedulers")) {
            std::string name = entry.get<std::string>();
            auto kind = pima::scheduler_from_name(name);
            if (!kind) throw pima::ConfigError("schedulers", "unknown scheduler '" + name + "'");
            spec.schedulers.push_back(*kind);
        }
    }
    return spec;
}

std::vector<double> parse_lambda_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            out.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw pima::ConfigError("lambda", "cannot parse '" + token + "' as a number");
        }
    }
    if (out.empty()) throw pima::ConfigError("lambda", "empty rate list");
    return out;
}

int run_simulate(const std::string& config_path, const std::string& preset,
                 std::string out_path, bool plot, int seeds_override, long frames_override,
                 const std::vector<std::string>& scheduler_names, const std::string& lambda_csv,
                 int threads) {
    pima::SweepSpec spec;
    if (!preset.empty()) {
        spec = pima::preset_spec(preset);
    } else {
        spec.lambda_grid = pima::default_lambda_grid();
        spec.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        spec.schedulers = {pima::SchedulerKind::GFEO};
    }
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw pima::ConfigError("config", "cannot open '" + config_path + "'");
        json j = json::parse(f);
        pima::SweepSpec file_spec = spec_from_json(j);
        if (j.contains("base")) spec.base = file_spec.base;
        if (j.contains("lambda_grid")) spec.lambda_grid = file_spec.lambda_grid;
        if (j.contains("seeds")) spec.seeds = file_spec.seeds;
        if (j.contains("schedulers")) spec.schedulers = file_spec.schedulers;
        if (j.contains("output_path")) spec.output_path = file_spec.output_path;
    }
    if (seeds_override > 0) {
        spec.seeds.clear();
        for (int i = 1; i <= seeds_override; ++i) spec.seeds.push_back(i);
    }
    if (frames_override > 0) spec.base.horizon_frames = frames_override;
    if (!scheduler_names.empty()) {
        spec.schedulers.clear();
        for (const std::string& name : scheduler_names) {
            auto kind = pima::scheduler_from_name(name);
            if (!kind) throw pima::ConfigError("scheduler", "unknown scheduler '" + name + "'");
            spec.schedulers.push_back(*kind);
        }
    }
    if (!lambda_csv.empty()) spec.lambda_grid = parse_lambda_list(lambda_csv);
    if (!out_path.empty()) spec.output_path = out_path;
    spec.validate();

    std::vector<pima::SweepRow> rows = pima::run_sweep(spec, threads);
    pima::write_csv(rows, spec.output_path);
    std::cout << "wrote " << spec.output_path << " (" << rows.size() << " rows)\n";

    if (plot) {
        std::string figure = preset.empty() ? "sweep" : preset;
        std::string script = figure + "_plot.py";
        pima::emit_plot_script(rows, figure, spec.output_path, script);
        std::cout << "wrote " << script << " (run with python3 to render " << figure << ".png)\n";
    }
    return 0;
}

int run_calibrate(std::uint64_t seed) {
    bool all_pass = true;
    for (const pima::calibrate::SuiteResult& r : pima::calibrate::run_all(seed)) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : kExitCalibrationMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PIMA coordinated random-access simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, out_path, lambda_csv;
    std::vector<std::string> scheduler_names;
    bool plot = false;
    int seeds_override = 0;
    long frames_override = 0;
    int threads = 0;
    std::uint64_t calib_seed = 42;

    CLI::App* sim = app.add_subcommand("simulate", "run a rate sweep and write a CSV table");
    sim->add_option("--config", config_path, "JSON config file (SweepSpec fields)");
    sim->add_option("--preset", preset, "scenario preset")
        ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    sim->add_option("--out", out_path, "output CSV path");
    sim->add_flag("--plot", plot, "also emit a matplotlib plotting script");
    sim->add_option("--seeds", seeds_override, "use seeds 1..k")->check(CLI::PositiveNumber);
    sim->add_option("--frames", frames_override, "frames per run")->check(CLI::PositiveNumber);
    sim->add_option("--scheduler", scheduler_names,
                    "scheduler(s) to run: tdma|saloha|pima|gfeo|sgfeo (repeatable)");
    sim->add_option("--lambda", lambda_csv, "comma-separated total rates [pkt/slot]");
    sim->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

    CLI::App* cal = app.add_subcommand("calibrate", "cross-check against brute-force references");
    cal->add_option("--seed", calib_seed, "RNG seed for the randomized instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(config_path, preset, out_path, plot, seeds_override,
                                frames_override, scheduler_names, lambda_csv, threads);
        return run_calibrate(calib_seed);
    } catch (const pima::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const json::exception& e) {
        std::cerr << "error: invalid config JSON: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
