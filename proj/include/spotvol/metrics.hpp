#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "spotvol/path.hpp"

/// Pathwise eigenvalue error metrics: MSE on the largest, mSE on the smallest.
namespace spotvol::metrics {

/// Half-open range [begin, end) of grid indices.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
    bool contains(std::size_t k) const noexcept { return k >= begin && k < end; }
};

/**
 * Grid indices k in 1..N0 with k/N0 in [fraction/2, 1 - fraction/2].
 *
 * N0 = 100, fraction = 0.1 keeps 5..95; fraction = 0 keeps 1..N0.
 * Throws ContractViolation unless 0 <= fraction < 0.5.
 */
IndexRange trim_indices(std::size_t n0, double fraction);

enum class Which { Max, Min };

/// Mean over retained grid points of |est lambda - true lambda|^2, and the
/// number of points it was averaged over.
struct EigenError {
    double value = 0.0;
    std::size_t count = 0;
};

/**
 * Compares est against truth on the grid points kept by trim_indices.
 *
 * `truth` holds Sigma(t_k) for k = 0..N0. Every est point must carry a grid
 * index with a matching time (ContractViolation otherwise); est points
 * outside the trimmed range are ignored.
 */
EigenError eigen_mse(const SpotMatrixSeries& est, const SpotMatrixSeries& truth, Which which,
                     double trim);

struct ErrorReport {
    double mse = 0.0;
    double mse_min = 0.0;
    double trim_fraction = 0.0;
    std::size_t evaluated_count = 0;
    std::string method;
};

ErrorReport error_report(const SpotMatrixSeries& est, const SpotMatrixSeries& truth,
                         double trim, std::string method);

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;  ///< sample sd / sqrt(count); 0 for a single value
};

MeanStderr mean_stderr(std::span<const double> values);

/// Values below 1e-10 print as the epsilon marker.
inline constexpr double kEpsilonThreshold = 1e-10;

/// Table cell for `value` shown in units of `unit` (1e-4 in the report
/// tables): "ε" when value < 1e-10, otherwise value / unit with `digits`
/// significant digits.
std::string format_table_value(double value, double unit = 1e-4, int digits = 4);

}  // namespace spotvol::metrics
