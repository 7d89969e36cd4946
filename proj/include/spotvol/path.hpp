#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spotvol/eig.hpp"

namespace spotvol {

/**
 * Discretely observed d-dimensional path on an equally spaced grid
 * t_i = i*T/n, i = 0..n.
 *
 * Values are stored row-major, one row of d values per observation time.
 * Construction validates the grid (strictly increasing, starts at 0,
 * equally spaced within 1e-9*T) and rejects non-finite entries.
 */
class PathSample {
public:
    PathSample(std::vector<double> times, std::vector<double> values,
               std::vector<std::string> labels);

    /// Regular grid on [0, horizon] with n = rows - 1 steps; labels x1..xd.
    static PathSample on_grid(double horizon, std::size_t dim, std::vector<double> values);

    std::size_t dim() const noexcept { return labels_.size(); }
    /// Number of increments n (there are n + 1 observations).
    std::size_t steps() const noexcept { return times_.size() - 1; }
    double horizon() const noexcept { return times_.back(); }
    double spacing() const noexcept { return horizon() / static_cast<double>(steps()); }

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        return values_[i * dim() + j];
    }

    /// Observations of component j as a contiguous copy.
    std::vector<double> component(std::size_t j) const;

    /// Index i with |t - t_i| <= 1e-9 * spacing, if any.
    std::optional<std::size_t> grid_index_of(double t) const noexcept;

    /// Same observations with the time axis mapped affinely onto [0, new_horizon].
    PathSample with_horizon(double new_horizon) const;

    friend bool operator==(const PathSample&, const PathSample&) = default;

private:
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

/// One estimated (or true) spot volatility matrix with its spectrum.
struct SpotPoint {
    double time = 0.0;
    /// Index into the observation grid when the time is a grid point.
    std::optional<std::size_t> grid_index;
    SymMatrix sigma;
    Spectrum spectrum;
};

/// Time series of spot matrices, ordered by evaluation time.
struct SpotMatrixSeries {
    std::vector<SpotPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    /// Appends sigma at time t, computing its spectrum.
    void push(double t, std::optional<std::size_t> grid_index, SymMatrix sigma);
};

}  // namespace spotvol
