// spotvol: simulate paths, estimate spot volatility spectra, run and report experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 estimation/runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spotvol/errors.hpp"
#include "spotvol/experiment.hpp"
#include "spotvol/io.hpp"
#include "spotvol/sim.hpp"

namespace fs = std::filesystem;
namespace ex = spotvol::experiment;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SpecFlags {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config, "experiment config (JSON)")->check(CLI::ExistingFile);
        app->add_option("-p,--preset", preset, "bundled preset (paper-heston)");
        app->add_option("-s,--seed", seed, "override the master seed");
        app->add_option("-w,--workers", workers, "worker threads (0: all cores)");
    }

    ex::ExperimentSpec load() const {
        ex::ExperimentSpec spec;
        if (!config.empty()) {
            spec = ex::load_experiment(config);
        } else if (preset == "paper-heston") {
            spec = ex::paper_heston_preset();
        } else if (preset.empty()) {
            throw spotvol::ConfigError("give --config <file> or --preset paper-heston");
        } else {
            throw spotvol::ConfigError("unknown preset '" + preset + "'");
        }
        if (seed) spec.seed = *seed;
        if (workers) spec.workers = *workers;
        return spec;
    }
};

std::ofstream open_out(const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw spotvol::IoError("cannot create " + file.string());
    return out;
}

int cmd_simulate(const SpecFlags& flags, std::optional<std::size_t> grid, std::uint64_t rep,
                 const fs::path& out_dir) {
    ex::ExperimentSpec spec = flags.load();
    spotvol::sim::HestonSpec model = spec.model;
    model.grid_size = grid.value_or(spec.grid_sizes.front());
    const auto simulation = spotvol::sim::simulate_heston(model, spec.jumps, spec.seed, rep);

    fs::create_directories(out_dir);
    spotvol::io::write_path_file(simulation.path, out_dir / "path.csv");
    spotvol::io::write_series_files(simulation.truth.sigma, out_dir / "truth");
    std::cout << "wrote " << (out_dir / "path.csv").string() << " (" << model.grid_size
              << " steps, " << simulation.jump_count << " jumps)\n";
    return 0;
}

int cmd_estimate(const std::string& input, const std::vector<std::string>& methods,
                 const fs::path& out_dir) {
    std::vector<ex::MethodSpec> specs;
    for (const auto& m : methods) specs.push_back(ex::MethodSpec::parse(m));
    const spotvol::PathSample path = spotvol::io::read_path_file(input);

    fs::create_directories(out_dir);
    int status = 0;
    for (const auto& m : specs) {
        try {
            const auto series = ex::estimate_path(path, m);
            spotvol::io::write_series_files(series, out_dir / m.label());
            std::cout << m.label() << ": " << series.size() << " points\n";
        } catch (const spotvol::ConfigError&) {
            throw;
        } catch (const spotvol::Error& e) {
            std::cerr << "failed: " << e.what() << '\n';
            status = kExitRuntime;
        }
    }
    return status;
}

int cmd_experiment(const SpecFlags& flags, const std::string& out_dir, bool no_traces) {
    ex::ExperimentSpec spec = flags.load();
    if (!out_dir.empty()) spec.output_dir = out_dir;
    if (spec.output_dir.empty()) spec.output_dir = "results";
    if (no_traces) spec.write_traces = false;
    spec.validate();

    const ex::ExperimentResult result = ex::run_experiment(spec, &std::cerr);
    std::vector<ex::SummaryRow> rows;
    for (const auto& s : result.rows) {
        rows.push_back({s.method, s.grid_size, s.mse.mean, s.mse_min.mean, s.mse.std_error,
                        s.mse_min.std_error, s.wall_ms});
    }
    ex::render_tables(rows, std::cout);
    for (const auto& s : result.rows) {
        if (s.failed()) {
            std::cerr << s.method << " at N0 = " << s.grid_size << ": " << s.failures << " of "
                      << s.replications << " replications failed (" << s.first_error << ")\n";
        }
    }
    return result.any_failure() ? kExitRuntime : 0;
}

int cmd_report(const std::string& summary, bool timing, const SpecFlags& flags) {
    if (timing) {
        const auto rows = ex::timing_report(flags.load());
        std::cout << std::setw(12) << "method" << std::setw(8) << "N0" << std::setw(14)
                  << "median_ms" << '\n';
        for (const auto& r : rows) {
            std::cout << std::setw(12) << r.method << std::setw(8) << r.grid_size << std::setw(14)
                      << std::fixed << std::setprecision(3) << r.median_ms << '\n';
        }
        return 0;
    }
    std::ifstream in(summary);
    if (!in) throw spotvol::IoError("cannot open " + summary);
    const auto rows = ex::read_summary_csv(in);
    ex::render_tables(rows, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spot volatility eigenvalue estimation"};
    app.require_subcommand(1);

    SpecFlags sim_flags;
    std::optional<std::size_t> sim_grid;
    std::uint64_t sim_rep = 0;
    std::string sim_out = "sim";
    auto* simulate = app.add_subcommand("simulate", "simulate one path and its true Sigma");
    sim_flags.attach(simulate);
    simulate->add_option("-n,--grid", sim_grid, "number of steps N0 (default: first grid size)");
    simulate->add_option("-r,--replication", sim_rep, "replication index");
    simulate->add_option("-o,--output", sim_out, "output directory");

    std::string est_input;
    std::vector<std::string> est_methods;
    std::string est_out = "estimates";
    auto* estimate = app.add_subcommand("estimate", "estimate Sigma(t) from a path CSV");
    estimate->add_option("-i,--input", est_input, "path CSV")->required()->check(CLI::ExistingFile);
    estimate->add_option("-m,--method", est_methods, "method label, e.g. QV, FS1-d3, FS2conv")
        ->required();
    estimate->add_option("-o,--output", est_out, "output directory");

    SpecFlags exp_flags;
    std::string exp_out;
    bool no_traces = false;
    auto* experiment = app.add_subcommand("experiment", "run the Monte Carlo study");
    exp_flags.attach(experiment);
    experiment->add_option("-o,--output", exp_out, "output directory (default: results)");
    experiment->add_flag("--no-traces", no_traces, "skip the per-time eigenvalue traces");

    SpecFlags rep_flags;
    std::string rep_summary;
    bool rep_timing = false;
    auto* report = app.add_subcommand("report", "print tables from a summary CSV, or time methods");
    rep_flags.attach(report);
    report->add_option("summary", rep_summary, "summary.csv from an experiment run");
    report->add_flag("--timing", rep_timing, "median-of-3 wall clock per method and N0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(sim_flags, sim_grid, sim_rep, sim_out);
        if (*estimate) return cmd_estimate(est_input, est_methods, est_out);
        if (*experiment) return cmd_experiment(exp_flags, exp_out, no_traces);
        if (*report) {
            if (!rep_timing && rep_summary.empty()) {
                throw spotvol::ConfigError("report needs a summary CSV or --timing");
            }
            return cmd_report(rep_summary, rep_timing, rep_flags);
        }
    } catch (const spotvol::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
