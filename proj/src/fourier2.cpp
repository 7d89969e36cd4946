#include "spotvol/fourier2.hpp"

#include <numbers>
#include <string>
#include <utility>

#include "spotvol/errors.hpp"

namespace spotvol::fourier2 {

using fourier::kTwoPi;

void Config::validate() const {
    if (cutoff < 1) throw ContractViolation("fourier2: cutoff N must be >= 1");
    if (kernel.type == Kernel::Type::SmoothedFejer && !(kernel.delta > 0.0)) {
        throw ContractViolation("fourier2: smoothed kernel needs delta > 0");
    }
}

FourierCoeffs increment_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq) {
    return increment_coeffs(path, j, max_freq, fourier::UnitRootTable(path.steps()));
}

FourierCoeffs increment_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq,
                               const fourier::UnitRootTable& table) {
    fourier::require_two_pi_horizon(path, "increment_coeffs");
    fourier::require_component(path, j, max_freq, "increment_coeffs");
    const std::size_t n = path.steps();
    if (table.n() != n) throw ContractViolation("increment_coeffs: table size != steps");

    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = path(i + 1, j) - path(i, j);

    FourierCoeffs out;
    out.component = j;
    out.cosine.resize(max_freq + 1);
    out.sine.resize(max_freq + 1);
    for (std::size_t s = 0; s <= max_freq; ++s) {
        const std::size_t stride = s % n;
        std::size_t idx = 0;  // (s * i) mod n
        double ca = 0.0;
        double sa = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ca += table.cos_at(idx) * delta[i];
            sa += table.sin_at(idx) * delta[i];
            idx += stride;
            if (idx >= n) idx -= n;
        }
        out.cosine[s] = ca;
        out.sine[s] = sa;
    }
    out.sine[0] = 0.0;
    return out;
}

namespace {

/// Coefficients extended to negative frequencies: a_{-m} = a_m, b_{-m} = -b_m.
class SignedCoeffs {
public:
    SignedCoeffs(const FourierCoeffs& c, std::size_t reach)
        : offset_(reach), a_(2 * reach + 1), b_(2 * reach + 1) {
        for (std::size_t m = 0; m <= reach; ++m) {
            a_[offset_ + m] = a_[offset_ - m] = c.cosine[m];
            b_[offset_ + m] = c.sine[m];
            b_[offset_ - m] = -c.sine[m];
        }
    }

    double a(long m) const { return a_[static_cast<std::size_t>(static_cast<long>(offset_) + m)]; }
    double b(long m) const { return b_[static_cast<std::size_t>(static_cast<long>(offset_) + m)]; }

private:
    std::size_t offset_;
    std::vector<double> a_;
    std::vector<double> b_;
};

void require_reach(const FourierCoeffs& c1, const FourierCoeffs& c2, std::size_t cutoff,
                   const char* op) {
    if (cutoff < 1) throw ContractViolation(std::string(op) + ": cutoff N must be >= 1");
    if (c1.max_freq() < 2 * cutoff || c2.max_freq() < 2 * cutoff) {
        throw ContractViolation(std::string(op) + ": coefficients must reach frequency 2N = " +
                                std::to_string(2 * cutoff));
    }
}

double alpha_zero(const FourierCoeffs& c1, const FourierCoeffs& c2, double increment1,
                  double increment2, std::size_t cutoff) {
    double acc = 0.0;
    for (std::size_t s = 1; s <= cutoff; ++s)
        acc += 2.0 * (c1.cosine[s] * c2.cosine[s] + c1.sine[s] * c2.sine[s]);
    acc += increment2 * increment1;
    return acc / (2.0 * std::numbers::pi * static_cast<double>(2 * cutoff + 1));
}

/// The four-term ordered sums of the real-form coefficients for one k.
std::pair<double, double> ordered_sums(const SignedCoeffs& x1, const SignedCoeffs& x2, long k,
                                       long cutoff) {
    double sa = 0.0;
    double sb = 0.0;
    for (long s = 1; s <= cutoff; ++s) {
        sa += x1.a(s) * x2.a(k - s) - x1.b(s) * x2.b(k - s) + x1.a(s) * x2.a(k + s) +
              x1.b(s) * x2.b(k + s);
        sb += x1.a(s) * x2.b(k - s) + x1.b(s) * x2.a(k - s) + x1.a(s) * x2.b(k + s) -
              x1.b(s) * x2.a(k + s);
    }
    return {sa, sb};
}

}  // namespace

SigmaCoeffs sigma_coeffs_unsymmetrized(const FourierCoeffs& c1, const FourierCoeffs& c2,
                                       double increment1, double increment2,
                                       std::size_t cutoff) {
    require_reach(c1, c2, cutoff, "sigma_coeffs_unsymmetrized");
    const SignedCoeffs x1(c1, 2 * cutoff);
    const SignedCoeffs x2(c2, 2 * cutoff);
    const double pref = 1.0 / (std::numbers::pi * static_cast<double>(2 * cutoff + 1));
    const long big_n = static_cast<long>(cutoff);

    SigmaCoeffs out;
    out.alpha0 = alpha_zero(c1, c2, increment1, increment2, cutoff);
    out.a.assign(cutoff + 1, 0.0);
    out.b.assign(cutoff + 1, 0.0);
    for (long k = 1; k <= big_n; ++k) {
        const auto [sa, sb] = ordered_sums(x1, x2, k, big_n);
        out.a[k] = pref * (sa + x2.a(k) * increment1);
        out.b[k] = pref * (sb + x2.b(k) * increment1);
    }
    return out;
}

SigmaCoeffs sigma_coeffs_convolution(const FourierCoeffs& c1, const FourierCoeffs& c2,
                                     double increment1, double increment2, std::size_t cutoff) {
    require_reach(c1, c2, cutoff, "sigma_coeffs_convolution");
    const SignedCoeffs x1(c1, 2 * cutoff);
    const SignedCoeffs x2(c2, 2 * cutoff);
    const double pref = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(2 * cutoff + 1));
    const long big_n = static_cast<long>(cutoff);

    SigmaCoeffs out;
    out.alpha0 = alpha_zero(c1, c2, increment1, increment2, cutoff);
    out.a.assign(cutoff + 1, 0.0);
    out.b.assign(cutoff + 1, 0.0);
    for (long k = 1; k <= big_n; ++k) {
        const auto [sa12, sb12] = ordered_sums(x1, x2, k, big_n);
        const auto [sa21, sb21] = ordered_sums(x2, x1, k, big_n);
        out.a[k] = pref * (sa12 + sa21 + x2.a(k) * increment1 + x1.a(k) * increment2);
        out.b[k] = pref * (sb12 + sb21 + x2.b(k) * increment1 + x1.b(k) * increment2);
    }
    return out;
}

double evaluate(const SigmaCoeffs& c, const fourier::WeightedTrigRow& row) {
    double acc = c.alpha0;
    for (std::size_t k = 1; k < c.a.size(); ++k)
        acc += c.a[k] * row.cos_w[k] + c.b[k] * row.sin_w[k];
    return acc;
}

namespace {

std::vector<SigmaCoeffs> build_pairs(const PathSample& rescaled, const Config& cfg) {
    const std::size_t d = rescaled.dim();
    const std::size_t n = rescaled.steps();
    const fourier::UnitRootTable table(n);
    std::vector<FourierCoeffs> per_component;
    std::vector<double> increments(d);
    per_component.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        per_component.push_back(increment_coeffs(rescaled, j, 2 * cfg.cutoff, table));
        increments[j] = rescaled(n, j) - rescaled(0, j);
    }

    std::vector<SigmaCoeffs> upper;
    upper.reserve(d * (d + 1) / 2);
    for (std::size_t u = 0; u < d; ++u) {
        for (std::size_t v = u; v < d; ++v) {
            if (cfg.symmetrization == Symmetrization::PostHoc) {
                upper.push_back(sigma_coeffs_unsymmetrized(per_component[u], per_component[v],
                                                           increments[u], increments[v],
                                                           cfg.cutoff));
            } else {
                upper.push_back(sigma_coeffs_convolution(per_component[u], per_component[v],
                                                         increments[u], increments[v],
                                                         cfg.cutoff));
            }
        }
    }
    return upper;
}

}  // namespace

Fit::Fit(const PathSample& path, const Config& cfg)
    : cfg_((cfg.validate(), cfg)),
      horizon_(path.horizon()),
      path_(path),
      upper_(build_pairs(path.with_horizon(kTwoPi), cfg)) {}

const SigmaCoeffs& Fit::pair(std::size_t u, std::size_t v) const {
    const std::size_t d = path_.dim();
    if (u > v) std::swap(u, v);
    if (v >= d) throw ContractViolation("fourier2::Fit::pair: index out of range");
    return upper_[u * d - u * (u - 1) / 2 + (v - u)];
}

SymMatrix Fit::at(double t, const Kernel& kernel) const {
    if (!(t > 0.0 && t < horizon_)) {
        throw ContractViolation("fourier2::Fit::at: t must lie in the open interval (0, T)");
    }
    const double s = t * kTwoPi / horizon_;
    const fourier::WeightedTrigRow row(kernel, cfg_.cutoff, s);
    const std::size_t d = path_.dim();
    SymMatrix out(d);
    for (std::size_t u = 0; u < d; ++u)
        for (std::size_t v = u; v < d; ++v) out.set(u, v, evaluate(pair(u, v), row));
    return (kTwoPi / horizon_) * out;
}

SpotMatrixSeries Fit::series(const Kernel& kernel, std::span<const double> times) const {
    SpotMatrixSeries out;
    out.points.reserve(times.size());
    for (double t : times) out.push(t, path_.grid_index_of(t), at(t, kernel));
    return out;
}

SpotMatrixSeries sigma_series_v2(const PathSample& path, const Config& cfg,
                                 std::span<const double> times) {
    return Fit(path, cfg).series(cfg.kernel, times);
}

}  // namespace spotvol::fourier2
