#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spotvol/fourier.hpp"
#include "spotvol/fourier2.hpp"
#include "spotvol/metrics.hpp"
#include "spotvol/path.hpp"
#include "spotvol/sim.hpp"

#include <json.hpp>

namespace spotvol::experiment {

enum class MethodKind { QV, BP, FS1, FS2 };

/**
 * One estimator configuration.
 *
 * Textual form (also the label used in every output file):
 *   QV | BP | FS1 | FS2post | FS2conv, optionally followed by a kernel
 *   suffix "-d1".."-d4" (smoothed kernel from the delta ladder) or
 *   "-delta=<x>" (explicit delta). No suffix means the plain Fejer kernel.
 */
struct MethodSpec {
    enum class KernelChoice { Fejer, Ladder, Explicit };

    MethodKind kind = MethodKind::QV;

    KernelChoice kernel_choice = KernelChoice::Fejer;
    std::size_t ladder_index = 0;
    double delta = 0.0;
    std::size_t n0 = 1;
    fourier2::Symmetrization symmetrization = fourier2::Symmetrization::PostHoc;
    std::optional<std::size_t> cutoff;  ///< default: Nyquist, 2N = n/2

    std::optional<double> bandwidth;  ///< default: from holder_alpha (and bg_index for BP)
    double holder_alpha = 0.5;
    double bg_index = 0.0;

    static MethodSpec parse(std::string_view text);
    std::string label() const;

    bool is_fourier() const noexcept { return kind == MethodKind::FS1 || kind == MethodKind::FS2; }

    /// Kernel for a path with n steps over [0, T].
    fourier::Kernel kernel_for(double horizon, std::size_t steps) const;
    std::size_t cutoff_for(std::size_t steps) const;
    double bandwidth_for(std::size_t steps, double horizon) const;
};

/// Grid times at which a method is evaluated by default: (h, T-h) on the grid
/// for QV/BP, all grid times strictly inside (0, T) for the Fourier schemes.
std::vector<double> default_eval_times(const PathSample& path, const MethodSpec& method);

/// Runs one method on one path. Errors are rethrown as the original type with
/// the method label prefixed to the message.
SpotMatrixSeries estimate_path(const PathSample& path, const MethodSpec& method,
                               std::optional<std::span<const double>> times = std::nullopt);

/// Estimates of several methods on one path, sharing each Fourier
/// coefficient pass between methods that differ only in their kernel.
struct MethodOutcome {
    std::optional<SpotMatrixSeries> series;
    std::string error;  ///< non-empty when the method failed
    double wall_ms = 0.0;
};

std::vector<MethodOutcome> estimate_all(const PathSample& path,
                                        std::span<const MethodSpec> methods);

struct ExperimentSpec {
    sim::HestonSpec model;
    std::optional<sim::JumpSpec> jumps;
    std::vector<MethodSpec> methods;
    std::vector<std::size_t> grid_sizes;
    std::size_t replications = 1;
    std::map<std::size_t, std::size_t> replications_by_grid;
    std::uint64_t seed = 0;
    double trim_fraction = 0.1;
    unsigned workers = 0;  ///< 0: hardware concurrency
    std::filesystem::path output_dir;
    bool write_traces = true;
    std::string preset;

    std::size_t replications_for(std::size_t grid_size) const;
    /// ConfigError on any inconsistency.
    void validate() const;
};

/// The `paper-heston` preset: Heston model, QV plus every first/second scheme
/// kernel, N0 in {1e2, 1e3, 1e4}, 100 replications (20 at 1e4), 10% trim.
ExperimentSpec paper_heston_preset();

/**
 * Config document (JSON). Every key is optional when "preset" is given:
 *
 *   preset             "paper-heston"
 *   model              {d, d1, drift, loadings (d rows of d1), mean_reversion,
 *                       long_run, vol_of_vol, v0, x0, horizon}
 *   jumps              {intensity, fixed: [d] | gaussian_stddev: x}
 *   methods            ["QV", "FS1-d3", ...]
 *   grid_sizes         [100, 1000]
 *   replications       100
 *   replications_by_grid {"10000": 20}
 *   seed, trim_fraction, workers, write_traces, output_dir
 */
ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec load_experiment(const std::filesystem::path& file);
nlohmann::json to_json(const ExperimentSpec& spec);

struct MethodSummary {
    std::string method;
    std::size_t grid_size = 0;
    std::size_t replications = 0;
    std::size_t failures = 0;
    std::string first_error;
    metrics::MeanStderr mse;
    metrics::MeanStderr mse_min;
    double wall_ms = 0.0;           ///< mean per-replication wall clock
    double negative_fraction = 0.0; ///< retained points with lambda_min < -1e-6
    double min_eigenvalue = 0.0;    ///< smallest lambda_min over every evaluated time
    double mean_sup_l1 = 0.0;       ///< mean over reps of sup_t sum_i |lambda_i err|
    double mean_l1 = 0.0;           ///< mean over reps of the retained-time average of the same
    std::size_t evaluated_points = 0;

    bool failed() const noexcept { return failures > 0; }
};

struct ExperimentResult {
    std::vector<MethodSummary> rows;

    const MethodSummary& find(std::string_view method, std::size_t grid_size) const;
    bool any_failure() const noexcept;
};

inline constexpr double kNegativeEigenThreshold = -1e-6;

/// Simulates, estimates with every method on the same paths, scores, and
/// (when output_dir is set) writes summary.csv, diagnostics.csv,
/// runs_N0_<n>.csv, trace_N0_<n>.csv and metadata.json.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* progress = nullptr);

/// Summary CSV: method,N0,mean_mse,mean_mse_min,stderr_mse,stderr_mse_min,wall_ms.
void write_summary_csv(const ExperimentResult& result, std::ostream& sink,
                       bool include_timing = true);

struct SummaryRow {
    std::string method;
    std::size_t grid_size = 0;
    double mean_mse = 0.0;
    double mean_mse_min = 0.0;
    double stderr_mse = 0.0;
    double stderr_mse_min = 0.0;
    double wall_ms = 0.0;
};

std::vector<SummaryRow> read_summary_csv(std::istream& source);

/// Report tables (x 1e-4, epsilon marker): one MSE and one
/// mSE row per N0, one column per method.
void render_tables(std::span<const SummaryRow> rows, std::ostream& out);

struct TimingRow {
    std::string method;
    std::size_t grid_size = 0;
    double median_ms = 0.0;
};

/// Median of three single-method wall-clock runs on replication 0 of each N0.
std::vector<TimingRow> timing_report(const ExperimentSpec& spec);

}  // namespace spotvol::experiment
