#include "spotvol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "spotvol/errors.hpp"

namespace spotvol::metrics {

IndexRange trim_indices(std::size_t n0, double fraction) {
    if (!(fraction >= 0.0 && fraction < 0.5)) {
        throw ContractViolation("trim fraction must lie in [0, 0.5)");
    }
    if (n0 == 0) return {};
    constexpr double eps = 1e-9;
    const double n = static_cast<double>(n0);
    const double lo = std::ceil(n * fraction / 2.0 - eps);
    const double hi = std::floor(n * (1.0 - fraction / 2.0) + eps);
    const auto begin = std::max<std::size_t>(1, static_cast<std::size_t>(lo));
    const auto last = std::min<std::size_t>(n0, static_cast<std::size_t>(hi));
    return {begin, last + 1};
}

EigenError eigen_mse(const SpotMatrixSeries& est, const SpotMatrixSeries& truth, Which which,
                     double trim) {
    if (truth.size() < 2) throw ContractViolation("eigen_mse: truth needs at least two points");
    const std::size_t n0 = truth.size() - 1;
    const IndexRange keep = trim_indices(n0, trim);
    const double step = truth.points.back().time / static_cast<double>(n0);

    EigenError out;
    double acc = 0.0;
    for (const SpotPoint& p : est.points) {
        if (!p.grid_index || *p.grid_index > n0 ||
            std::abs(truth.points[*p.grid_index].time - p.time) > 1e-9 * step) {
            throw ContractViolation("eigen_mse: estimate at t = " + std::to_string(p.time) +
                                    " is not on the truth grid");
        }
        if (!keep.contains(*p.grid_index)) continue;
        const Spectrum& ref = truth.points[*p.grid_index].spectrum;
        if (ref.size() != p.spectrum.size()) {
            throw ContractViolation("eigen_mse: dimension mismatch between estimate and truth");
        }
        const double e = which == Which::Max ? p.spectrum.max() - ref.max()
                                             : p.spectrum.min() - ref.min();
        acc += e * e;
        ++out.count;
    }
    out.value = out.count > 0 ? acc / static_cast<double>(out.count) : 0.0;
    return out;
}

ErrorReport error_report(const SpotMatrixSeries& est, const SpotMatrixSeries& truth,
                         double trim, std::string method) {
    const EigenError hi = eigen_mse(est, truth, Which::Max, trim);
    const EigenError lo = eigen_mse(est, truth, Which::Min, trim);
    return ErrorReport{hi.value, lo.value, trim, hi.count, std::move(method)};
}

MeanStderr mean_stderr(std::span<const double> values) {
    MeanStderr out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return out;
}

std::string format_table_value(double value, double unit, int digits) {
    if (std::abs(value) < kEpsilonThreshold) return "ε";
    std::ostringstream os;
    os.precision(digits);
    os << value / unit;
    return os.str();
}

}  // namespace spotvol::metrics
