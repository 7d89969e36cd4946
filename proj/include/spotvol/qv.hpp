#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spotvol/eig.hpp"
#include "spotvol/path.hpp"

/// Windowed quadratic-variation estimator and its jump-robust bipower variant.
namespace spotvol::qv {

struct Config {
    double bandwidth = 0.0;     ///< half-width h of the estimation window
    double holder_alpha = 0.5;  ///< Hoelder exponent used for the default bandwidth

    /// Throws ContractViolation unless 0 < h < T/2 and alpha in (0, 1].
    void validate(double horizon) const;
};

/// Finite-activity jump description driving the bipower bandwidth.
struct JumpModelInfo {
    double bg_index = 0.0;  ///< Blumenthal-Getoor index beta in [0, 2)
    double rate_exponent = 0.0;

    /// Upper bound min(alpha/(2 alpha + 1), (2 - beta)/(2 beta)) on gamma;
    /// beta = 0 means no second constraint.
    static double rate_bound(double alpha, double beta);
    /// gamma = 0.9 * rate_bound(alpha, beta).
    static JumpModelInfo with_default_rate(double alpha, double beta);

    void validate(double alpha) const;
};

/// h = T * n^(-1/(2 alpha + 1)).
double default_bandwidth(std::size_t n, double horizon, double alpha);

/// h = T * n^(-2 gamma) for the jump regime.
double jump_bandwidth(std::size_t n, double horizon, const JumpModelInfo& jumps);

/**
 * QV estimator over a fixed path.
 *
 *   Sigma_uv(t) = 1/(2h) sum_{t-h <= t_i < t_{i+1} <= t+h} dX_u(i) dX_v(i)
 *
 * Per-pair prefix sums of increment products make each evaluation O(d^2).
 * Window edges are compared with a 1e-9 * spacing tolerance so that grid
 * points lying on t +- h in exact arithmetic are always included.
 */
class QvEstimator {
public:
    QvEstimator(const PathSample& path, const Config& cfg);

    /// Throws OutOfWindowError if [t-h, t+h] leaves [0, T].
    SymMatrix at(double t) const;

    /// True when [t-h, t+h] lies inside [0, T].
    bool valid(double t) const noexcept;

    /// Grid times whose window fits inside [0, T].
    std::vector<double> interior_grid_times() const;

    SpotMatrixSeries series(std::span<const double> times) const;

    double bandwidth() const noexcept { return cfg_.bandwidth; }

private:
    Config cfg_;
    PathSample path_;
    std::vector<std::vector<double>> prefix_;  // per packed pair, size n + 1
};

/**
 * Bipower estimator, robust to finite-activity jumps:
 *
 *   Sigma_uv(t) = pi/(8h) sum_i ( |D_i(X_u+X_v) D_{i+1}(X_u+X_v)|
 *                                 - |D_i X_u D_{i+1} X_u| - |D_i X_v D_{i+1} X_v| )
 *
 * over t-h <= t_{i-1} < t_{i+1} <= t+h, D_i X = X(t_i) - X(t_{i-1}).
 */
class BipowerEstimator {
public:
    BipowerEstimator(const PathSample& path, const Config& cfg);

    SymMatrix at(double t) const;
    bool valid(double t) const noexcept;
    std::vector<double> interior_grid_times() const;
    SpotMatrixSeries series(std::span<const double> times) const;

    double bandwidth() const noexcept { return cfg_.bandwidth; }

private:
    Config cfg_;
    PathSample path_;
    std::vector<std::vector<double>> prefix_;
};

SymMatrix qv_estimate(const PathSample& path, const Config& cfg, double t);
SymMatrix bipower_estimate(const PathSample& path, const Config& cfg, double t);

}  // namespace spotvol::qv
