#include "spotvol/fourier1.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "spotvol/errors.hpp"

namespace spotvol::fourier1 {

using fourier::kTwoPi;

void Config::validate() const {
    if (cutoff < 1) throw ContractViolation("fourier1: cutoff N must be >= 1");
    if (n0 > cutoff) throw ContractViolation("fourier1: n0 must not exceed N");
    if (kernel.type == Kernel::Type::SmoothedFejer && !(kernel.delta > 0.0)) {
        throw ContractViolation("fourier1: smoothed kernel needs delta > 0");
    }
}

FourierCoeffs path_fourier_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq) {
    return path_fourier_coeffs(path, j, max_freq, fourier::UnitRootTable(path.steps()));
}

FourierCoeffs path_fourier_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq,
                                  const fourier::UnitRootTable& table) {
    fourier::require_two_pi_horizon(path, "path_fourier_coeffs");
    fourier::require_component(path, j, max_freq, "path_fourier_coeffs");
    const std::size_t n = path.steps();
    if (table.n() != n) throw ContractViolation("path_fourier_coeffs: table size != steps");

    const std::vector<double> x = path.component(j);
    const double boundary = (x[n] - x[0]) / std::numbers::pi;

    FourierCoeffs out;
    out.component = j;
    out.cosine.resize(max_freq + 1);
    out.sine.resize(max_freq + 1);
    for (std::size_t k = 0; k <= max_freq; ++k) {
        const std::size_t stride = k % n;
        std::size_t prev = 0;  // (k * (i-1)) mod n
        double ca = 0.0;
        double sa = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            std::size_t cur = prev + stride;
            if (cur >= n) cur -= n;
            ca += (table.cos_at(prev) - table.cos_at(cur)) * x[i - 1];
            sa += (table.sin_at(prev) - table.sin_at(cur)) * x[i - 1];
            prev = cur;
        }
        out.cosine[k] = ca / std::numbers::pi + boundary;
        out.sine[k] = sa / std::numbers::pi;
    }
    out.sine[0] = 0.0;
    return out;
}

SigmaCoeffs sigma_fourier_coeffs(const FourierCoeffs& cu, const FourierCoeffs& cv,
                                 const Config& cfg) {
    cfg.validate();
    const std::size_t big_n = cfg.cutoff;
    if (cu.max_freq() < 2 * big_n || cv.max_freq() < 2 * big_n) {
        throw ContractViolation("sigma_fourier_coeffs: coefficients must reach frequency 2N = " +
                                std::to_string(2 * big_n));
    }
    const double count = static_cast<double>(big_n + 1 - cfg.n0);
    const double scale = std::numbers::pi / count;

    SigmaCoeffs out;
    out.a.assign(big_n + 1, 0.0);
    out.b.assign(big_n + 1, 0.0);

    const auto& au = cu.cosine;
    const auto& bu = cu.sine;
    const auto& av = cv.cosine;
    const auto& bv = cv.sine;

    double a0 = 0.0;
    for (std::size_t s = cfg.n0; s <= big_n; ++s) a0 += au[s] * av[s] + bu[s] * bv[s];
    out.a[0] = 0.5 * scale * a0;

    for (std::size_t k = 0; k <= big_n; ++k) {
        double ak = 0.0;
        double bk = 0.0;
        for (std::size_t s = cfg.n0; s <= big_n; ++s) {
            ak += au[s] * av[s + k] + av[s] * au[s + k];
            bk += au[s] * bv[s + k] + av[s] * bu[s + k];
        }
        if (k > 0) out.a[k] = scale * ak;
        out.b[k] = scale * bk;
    }
    return out;
}

PairCoefficients::PairCoefficients(std::size_t dim, std::vector<SigmaCoeffs> upper)
    : dim_(dim), upper_(std::move(upper)) {
    if (upper_.size() != dim * (dim + 1) / 2) {
        throw ContractViolation("PairCoefficients: expected d(d+1)/2 pairs");
    }
}

const SigmaCoeffs& PairCoefficients::operator()(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    if (v >= dim_) throw ContractViolation("PairCoefficients: index out of range");
    // Row-major packed upper triangle.
    return upper_[u * dim_ - u * (u - 1) / 2 + (v - u)];
}

namespace {

SymMatrix reconstruct_with(const PairCoefficients& coeffs, const fourier::WeightedTrigRow& row) {
    const std::size_t d = coeffs.dim();
    SymMatrix out(d);
    for (std::size_t u = 0; u < d; ++u) {
        for (std::size_t v = u; v < d; ++v) {
            const SigmaCoeffs& c = coeffs(u, v);
            double acc = 0.0;
            for (std::size_t k = 0; k < c.a.size(); ++k)
                acc += c.a[k] * row.cos_w[k] + c.b[k] * row.sin_w[k];
            out.set(u, v, acc);
        }
    }
    return out;
}

void require_open_interval(double t, double horizon, const char* op) {
    if (!(t > 0.0 && t < horizon)) {
        throw ContractViolation(std::string(op) + ": t must lie in the open interval (0, T)");
    }
}

}  // namespace

SymMatrix reconstruct_sigma(const PairCoefficients& coeffs, const Config& cfg, double t) {
    cfg.validate();
    require_open_interval(t, kTwoPi, "reconstruct_sigma");
    return reconstruct_with(coeffs, fourier::WeightedTrigRow(cfg.kernel, cfg.cutoff, t));
}

namespace {

PairCoefficients build_pairs(const PathSample& rescaled, const Config& cfg) {
    const std::size_t d = rescaled.dim();
    const fourier::UnitRootTable table(rescaled.steps());
    std::vector<FourierCoeffs> per_component;
    per_component.reserve(d);
    for (std::size_t j = 0; j < d; ++j)
        per_component.push_back(path_fourier_coeffs(rescaled, j, 2 * cfg.cutoff, table));

    std::vector<SigmaCoeffs> upper;
    upper.reserve(d * (d + 1) / 2);
    for (std::size_t u = 0; u < d; ++u)
        for (std::size_t v = u; v < d; ++v)
            upper.push_back(sigma_fourier_coeffs(per_component[u], per_component[v], cfg));
    return PairCoefficients(d, std::move(upper));
}

}  // namespace

Fit::Fit(const PathSample& path, const Config& cfg)
    : cfg_((cfg.validate(), cfg)),
      horizon_(path.horizon()),
      path_(path),
      coeffs_(build_pairs(path.with_horizon(kTwoPi), cfg)) {}

SymMatrix Fit::at(double t, const Kernel& kernel) const {
    require_open_interval(t, horizon_, "fourier1::Fit::at");
    const double s = t * kTwoPi / horizon_;
    return (kTwoPi / horizon_) *
           reconstruct_with(coeffs_, fourier::WeightedTrigRow(kernel, cfg_.cutoff, s));
}

SpotMatrixSeries Fit::series(const Kernel& kernel, std::span<const double> times) const {
    SpotMatrixSeries out;
    out.points.reserve(times.size());
    for (double t : times) out.push(t, path_.grid_index_of(t), at(t, kernel));
    return out;
}

SpotMatrixSeries sigma_series(const PathSample& path, const Config& cfg,
                              std::span<const double> times) {
    return Fit(path, cfg).series(cfg.kernel, times);
}

}  // namespace spotvol::fourier1
