#include "spotvol/path.hpp"

#include <cmath>
#include <utility>

#include "spotvol/errors.hpp"

namespace spotvol {

namespace {
constexpr double kGridTolerance = 1e-9;
}

PathSample::PathSample(std::vector<double> times, std::vector<double> values,
                       std::vector<std::string> labels)
    : times_(std::move(times)), values_(std::move(values)), labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("path has no components");
    if (times_.size() < 2) throw InsufficientDataError("path needs at least two observations");
    if (values_.size() != times_.size() * labels_.size()) {
        throw ValidationError("path values size does not match times x components");
    }
    for (double t : times_)
        if (!std::isfinite(t)) throw ValidationError("non-finite observation time");
    for (double v : values_)
        if (!std::isfinite(v)) throw ValidationError("non-finite observation value");

    const double horizon = times_.back();
    if (!(horizon > 0.0)) throw ValidationError("path horizon must be positive");
    if (std::abs(times_.front()) > kGridTolerance * horizon) {
        throw ValidationError("path must start at t = 0");
    }
    const double step = horizon / static_cast<double>(times_.size() - 1);
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw ValidationError("observation times must be strictly increasing (row " +
                                  std::to_string(i) + ")");
        }
        if (std::abs(times_[i] - step * static_cast<double>(i)) > kGridTolerance * horizon) {
            throw ValidationError("irregular observation grid at row " + std::to_string(i));
        }
    }
}

PathSample PathSample::on_grid(double horizon, std::size_t dim, std::vector<double> values) {
    if (dim == 0 || values.size() % dim != 0) {
        throw ContractViolation("PathSample::on_grid: values not a multiple of dim");
    }
    const std::size_t rows = values.size() / dim;
    if (rows < 2) throw InsufficientDataError("path needs at least two observations");
    const std::size_t n = rows - 1;
    std::vector<double> times(rows);
    for (std::size_t i = 0; i < rows; ++i)
        times[i] = horizon * static_cast<double>(i) / static_cast<double>(n);
    times.back() = horizon;
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < dim; ++j) labels.push_back("x" + std::to_string(j + 1));
    return PathSample(std::move(times), std::move(values), std::move(labels));
}

std::vector<double> PathSample::component(std::size_t j) const {
    if (j >= dim()) throw ContractViolation("component index out of range");
    std::vector<double> out(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) out[i] = (*this)(i, j);
    return out;
}

PathSample PathSample::with_horizon(double new_horizon) const {
    std::vector<double> times(times_.size());
    const double n = static_cast<double>(steps());
    for (std::size_t i = 0; i < times.size(); ++i)
        times[i] = new_horizon * static_cast<double>(i) / n;
    times.back() = new_horizon;
    return PathSample(std::move(times), values_, labels_);
}

std::optional<std::size_t> PathSample::grid_index_of(double t) const noexcept {
    const double step = spacing();
    const double pos = std::round(t / step);
    if (pos < 0.0 || pos > static_cast<double>(steps())) return std::nullopt;
    const auto i = static_cast<std::size_t>(pos);
    if (std::abs(times_[i] - t) > 1e-9 * step) return std::nullopt;
    return i;
}

void SpotMatrixSeries::push(double t, std::optional<std::size_t> grid_index, SymMatrix sigma) {
    Spectrum spectrum = eigenvalues_sym(sigma);
    points.push_back(SpotPoint{t, grid_index, std::move(sigma), std::move(spectrum)});
}

}  // namespace spotvol
