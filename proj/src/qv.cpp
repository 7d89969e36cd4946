#include "spotvol/qv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spotvol/errors.hpp"

namespace spotvol::qv {

void Config::validate(double horizon) const {
    if (!(bandwidth > 0.0 && bandwidth < horizon / 2.0)) {
        throw ContractViolation("qv: bandwidth must satisfy 0 < h < T/2 (h = " +
                                std::to_string(bandwidth) + ")");
    }
    if (!(holder_alpha > 0.0 && holder_alpha <= 1.0)) {
        throw ContractViolation("qv: holder_alpha must lie in (0, 1]");
    }
}

double JumpModelInfo::rate_bound(double alpha, double beta) {
    const double diffusive = alpha / (2.0 * alpha + 1.0);
    if (beta <= 0.0) return diffusive;
    return std::min(diffusive, (2.0 - beta) / (2.0 * beta));
}

JumpModelInfo JumpModelInfo::with_default_rate(double alpha, double beta) {
    return JumpModelInfo{beta, 0.9 * rate_bound(alpha, beta)};
}

void JumpModelInfo::validate(double alpha) const {
    if (!(bg_index >= 0.0 && bg_index < 2.0)) {
        throw ContractViolation("Blumenthal-Getoor index must lie in [0, 2)");
    }
    if (!(rate_exponent > 0.0 && rate_exponent < rate_bound(alpha, bg_index))) {
        throw ContractViolation("jump rate exponent outside (0, min(a/(2a+1), (2-b)/(2b)))");
    }
}

double default_bandwidth(std::size_t n, double horizon, double alpha) {
    return horizon * std::pow(static_cast<double>(n), -1.0 / (2.0 * alpha + 1.0));
}

double jump_bandwidth(std::size_t n, double horizon, const JumpModelInfo& jumps) {
    return horizon * std::pow(static_cast<double>(n), -2.0 * jumps.rate_exponent);
}

namespace {

constexpr double kEdgeTolerance = 1e-9;

/// Grid indices lo = first with t_lo >= t-h, hi = last with t_hi <= t+h.
struct Window {
    std::size_t lo;
    std::size_t hi;
};

bool window_fits(const PathSample& path, double h, double t) {
    const double slack = kEdgeTolerance * path.spacing();
    return t - h >= -slack && t + h <= path.horizon() + slack;
}

Window window_for(const PathSample& path, double h, double t) {
    if (!window_fits(path, h, t)) {
        throw OutOfWindowError("evaluation time " + std::to_string(t) +
                               " too close to the ends for h = " + std::to_string(h));
    }
    const double step = path.spacing();
    const double n = static_cast<double>(path.steps());
    const double lo = std::clamp(std::ceil((t - h) / step - kEdgeTolerance), 0.0, n);
    const double hi = std::clamp(std::floor((t + h) / step + kEdgeTolerance), 0.0, n);
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

std::vector<double> interior_times(const PathSample& path, double h) {
    std::vector<double> out;
    for (double t : path.times())
        if (window_fits(path, h, t)) out.push_back(t);
    return out;
}

std::size_t packed(std::size_t d, std::size_t u, std::size_t v) {
    return u * d - u * (u - 1) / 2 + (v - u);
}

std::vector<double> increments(const PathSample& path, std::size_t j) {
    std::vector<double> out(path.steps());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = path(i + 1, j) - path(i, j);
    return out;
}

}  // namespace

QvEstimator::QvEstimator(const PathSample& path, const Config& cfg) : cfg_(cfg), path_(path) {
    cfg_.validate(path.horizon());
    const std::size_t d = path.dim();
    const std::size_t n = path.steps();
    std::vector<std::vector<double>> inc(d);
    for (std::size_t j = 0; j < d; ++j) inc[j] = increments(path, j);

    prefix_.resize(d * (d + 1) / 2);
    for (std::size_t u = 0; u < d; ++u) {
        for (std::size_t v = u; v < d; ++v) {
            auto& p = prefix_[packed(d, u, v)];
            p.resize(n + 1);
            long double run = 0.0L;
            p[0] = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                run += static_cast<long double>(inc[u][i]) * inc[v][i];
                p[i + 1] = static_cast<double>(run);
            }
        }
    }
}

bool QvEstimator::valid(double t) const noexcept {
    return window_fits(path_, cfg_.bandwidth, t);
}

SymMatrix QvEstimator::at(double t) const {
    const Window w = window_for(path_, cfg_.bandwidth, t);
    if (w.hi <= w.lo) throw DegenerateWindowError("QV window contains no increment");
    const std::size_t d = path_.dim();
    const double scale = 1.0 / (2.0 * cfg_.bandwidth);
    SymMatrix out(d);
    for (std::size_t u = 0; u < d; ++u) {
        for (std::size_t v = u; v < d; ++v) {
            const auto& p = prefix_[packed(d, u, v)];
            out.set(u, v, scale * (p[w.hi] - p[w.lo]));
        }
    }
    return out;
}

std::vector<double> QvEstimator::interior_grid_times() const {
    return interior_times(path_, cfg_.bandwidth);
}

SpotMatrixSeries QvEstimator::series(std::span<const double> times) const {
    SpotMatrixSeries out;
    out.points.reserve(times.size());
    for (double t : times) out.push(t, path_.grid_index_of(t), at(t));
    return out;
}

BipowerEstimator::BipowerEstimator(const PathSample& path, const Config& cfg)
    : cfg_(cfg), path_(path) {
    cfg_.validate(path.horizon());
    const std::size_t d = path.dim();
    const std::size_t n = path.steps();
    std::vector<std::vector<double>> inc(d);
    for (std::size_t j = 0; j < d; ++j) inc[j] = increments(path, j);

    // term(i), i = 1..n-1, pairs D_i = inc[i-1] with D_{i+1} = inc[i].
    // prefix[m] = sum_{1 <= i < m} term(i).
    prefix_.resize(d * (d + 1) / 2);
    for (std::size_t u = 0; u < d; ++u) {
        for (std::size_t v = u; v < d; ++v) {
            auto& p = prefix_[packed(d, u, v)];
            p.assign(n + 1, 0.0);
            long double run = 0.0L;
            for (std::size_t i = 1; i < n; ++i) {
                const double sum_prev = inc[u][i - 1] + inc[v][i - 1];
                const double sum_next = inc[u][i] + inc[v][i];
                const double term = std::abs(sum_prev * sum_next) -
                                    std::abs(inc[u][i - 1] * inc[u][i]) -
                                    std::abs(inc[v][i - 1] * inc[v][i]);
                run += term;
                p[i + 1] = static_cast<double>(run);
            }
        }
    }
}

bool BipowerEstimator::valid(double t) const noexcept {
    return window_fits(path_, cfg_.bandwidth, t);
}

SymMatrix BipowerEstimator::at(double t) const {
    const Window w = window_for(path_, cfg_.bandwidth, t);
    if (w.hi < w.lo + 2) {
        throw DegenerateWindowError("bipower window needs two consecutive increments");
    }
    const std::size_t d = path_.dim();
    const double scale = std::numbers::pi / (8.0 * cfg_.bandwidth);
    SymMatrix out(d);
    for (std::size_t u = 0; u < d; ++u) {
        for (std::size_t v = u; v < d; ++v) {
            const auto& p = prefix_[packed(d, u, v)];
            out.set(u, v, scale * (p[w.hi] - p[w.lo + 1]));
        }
    }
    return out;
}

std::vector<double> BipowerEstimator::interior_grid_times() const {
    return interior_times(path_, cfg_.bandwidth);
}

SpotMatrixSeries BipowerEstimator::series(std::span<const double> times) const {
    SpotMatrixSeries out;
    out.points.reserve(times.size());
    for (double t : times) out.push(t, path_.grid_index_of(t), at(t));
    return out;
}

SymMatrix qv_estimate(const PathSample& path, const Config& cfg, double t) {
    return QvEstimator(path, cfg).at(t);
}

SymMatrix bipower_estimate(const PathSample& path, const Config& cfg, double t) {
    return BipowerEstimator(path, cfg).at(t);
}

}  // namespace spotvol::qv
