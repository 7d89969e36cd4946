#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "spotvol/errors.hpp"
#include "spotvol/fourier2.hpp"
#include "support.hpp"

namespace f2 = spotvol::fourier2;
using spotvol::fourier::Kernel;
using testsupport::kTwoPi;

namespace {

spotvol::PathSample random_path(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    return testsupport::from_function(n, kTwoPi, d,
                                      [&](double, std::size_t) { return gauss(rng); });
}

/// c_k = 1/(2 pi) sum_i e^{-i k t_i} delta_i for |k| <= reach.
std::vector<std::complex<double>> complex_coeffs(const spotvol::PathSample& p, std::size_t j,
                                                 long reach) {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(2 * reach + 1));
    for (long k = -reach; k <= reach; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < p.steps(); ++i) {
            const double phase = -static_cast<double>(k) * p.times()[i];
            acc += std::polar(1.0, phase) * (p(i + 1, j) - p(i, j));
        }
        out[static_cast<std::size_t>(k + reach)] = acc / kTwoPi;
    }
    return out;
}

/// alpha_k = 2 pi/(2N+1) sum_{|s| <= N} c1_s c2_{k-s}.
std::complex<double> alpha(const std::vector<std::complex<double>>& c1,
                           const std::vector<std::complex<double>>& c2, long k, long big_n) {
    const long reach = (static_cast<long>(c1.size()) - 1) / 2;
    std::complex<double> acc = 0.0;
    for (long s = -big_n; s <= big_n; ++s)
        acc += c1[static_cast<std::size_t>(s + reach)] * c2[static_cast<std::size_t>(k - s + reach)];
    return kTwoPi / static_cast<double>(2 * big_n + 1) * acc;
}

f2::SigmaCoeffs pair_coeffs(const spotvol::PathSample& p, std::size_t u, std::size_t v,
                            std::size_t big_n, bool conv) {
    const auto cu = f2::increment_coeffs(p, u, 2 * big_n);
    const auto cv = f2::increment_coeffs(p, v, 2 * big_n);
    const double iu = p(p.steps(), u) - p(0, u);
    const double iv = p(p.steps(), v) - p(0, v);
    return conv ? f2::sigma_coeffs_convolution(cu, cv, iu, iv, big_n)
                : f2::sigma_coeffs_unsymmetrized(cu, cv, iu, iv, big_n);
}

}  // namespace

TEST(Fourier2, IncrementCoefficientsMatchDirectSums) {
    const auto p = random_path(10, 2, 7);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto c = f2::increment_coeffs(p, j, 25);
        for (std::size_t s = 0; s <= 25; ++s) {
            double ca = 0.0;
            double sa = 0.0;
            for (std::size_t i = 0; i < 10; ++i) {
                const double delta = p(i + 1, j) - p(i, j);
                ca += std::cos(static_cast<double>(s) * p.times()[i]) * delta;
                sa += std::sin(static_cast<double>(s) * p.times()[i]) * delta;
            }
            EXPECT_NEAR(c.cosine[s], ca, 1e-12);
            EXPECT_NEAR(c.sine[s], sa, 1e-12);
        }
    }
}

TEST(Fourier2, SingleUnitIncrement) {
    // One increment of size 1 at step i0: a_s = cos(s t_i0), b_s = sin(s t_i0).
    const std::size_t n = 16;
    const std::size_t i0 = 5;
    const auto p = testsupport::from_function(n, kTwoPi, 1, [&](double t, std::size_t) {
        return t > kTwoPi * static_cast<double>(i0) / n + 1e-9 ? 1.0 : 0.0;
    });
    const auto c = f2::increment_coeffs(p, 0, 8);
    for (std::size_t s = 0; s <= 8; ++s) {
        const double t = p.times()[i0];
        EXPECT_NEAR(c.cosine[s], std::cos(static_cast<double>(s) * t), 1e-14);
        EXPECT_NEAR(c.sine[s], std::sin(static_cast<double>(s) * t), 1e-14);
    }
}

TEST(Fourier2, RealFormMatchesComplexConvolution) {
    const auto p = random_path(40, 2, 12);
    const long big_n = 9;
    const auto c0 = complex_coeffs(p, 0, 2 * big_n);
    const auto c1 = complex_coeffs(p, 1, 2 * big_n);
    for (auto [u, v] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 0}, {0, 0}}) {
        const auto& cu = u == 0 ? c0 : c1;
        const auto& cv = v == 0 ? c0 : c1;
        const auto got = pair_coeffs(p, u, v, static_cast<std::size_t>(big_n), false);
        EXPECT_NEAR(got.alpha0, alpha(cu, cv, 0, big_n).real(), 1e-12);
        for (long k = 1; k <= big_n; ++k) {
            const auto a = alpha(cu, cv, k, big_n);
            EXPECT_NEAR(got.a[static_cast<std::size_t>(k)], 2.0 * a.real(), 1e-12) << k;
            EXPECT_NEAR(got.b[static_cast<std::size_t>(k)], -2.0 * a.imag(), 1e-12) << k;
        }
    }
}

TEST(Fourier2, ComplexCoefficientsAreConjugateSymmetric) {
    const auto p = random_path(20, 1, 2);
    const auto c = complex_coeffs(p, 0, 6);
    for (long k = 1; k <= 6; ++k) {
        EXPECT_NEAR(std::abs(c[static_cast<std::size_t>(6 + k)] -
                             std::conj(c[static_cast<std::size_t>(6 - k)])),
                    0.0, 1e-14);
    }
}

TEST(Fourier2, OrderedPairsDiffer) {
    const auto p = random_path(40, 2, 5);
    const auto uv = pair_coeffs(p, 0, 1, 8, false);
    const auto vu = pair_coeffs(p, 1, 0, 8, false);
    double gap = 0.0;
    for (std::size_t k = 1; k <= 8; ++k) gap += std::abs(uv.a[k] - vu.a[k]);
    EXPECT_GT(gap, 1e-6);
    EXPECT_NEAR(uv.alpha0, vu.alpha0, 1e-14);
}

TEST(Fourier2, ConvolutionAveragesBothOrders) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = random_path(60, 2, 40 + seed);
        const auto uv = pair_coeffs(p, 0, 1, 12, false);
        const auto vu = pair_coeffs(p, 1, 0, 12, false);
        const auto conv = pair_coeffs(p, 0, 1, 12, true);
        EXPECT_NEAR(conv.alpha0, 0.5 * (uv.alpha0 + vu.alpha0), 1e-12);
        for (std::size_t k = 1; k <= 12; ++k) {
            EXPECT_NEAR(conv.a[k], 0.5 * (uv.a[k] + vu.a[k]), 1e-12);
            EXPECT_NEAR(conv.b[k], 0.5 * (uv.b[k] + vu.b[k]), 1e-12);
        }
    }
}

TEST(Fourier2, ConvolutionEstimateIsMeanOfOrderedEstimates) {
    const auto p = random_path(128, 2, 77);
    const std::size_t big_n = 32;
    const auto uv = pair_coeffs(p, 0, 1, big_n, false);
    const auto vu = pair_coeffs(p, 1, 0, big_n, false);
    f2::Config cfg;
    cfg.cutoff = big_n;
    cfg.symmetrization = f2::Symmetrization::Convolution;
    const f2::Fit fit(p, cfg);
    for (double t : {0.3, 1.7, 3.1, 5.9}) {
        const spotvol::fourier::WeightedTrigRow row(Kernel::fejer(), big_n, t);
        const double mean = 0.5 * (f2::evaluate(uv, row) + f2::evaluate(vu, row));
        EXPECT_NEAR(fit.at(t, Kernel::fejer())(0, 1), mean, 1e-10);
    }
}

TEST(Fourier2, OneDimensionalSymmetrizationsCoincide) {
    const auto p = random_path(100, 1, 8);
    f2::Config post;
    post.cutoff = 25;
    f2::Config conv = post;
    conv.symmetrization = f2::Symmetrization::Convolution;
    const f2::Fit a(p, post);
    const f2::Fit b(p, conv);
    for (double t : {0.5, 2.0, 4.0}) {
        const double x = a.at(t, Kernel::fejer())(0, 0);
        EXPECT_NEAR(b.at(t, Kernel::fejer())(0, 0), x, 1e-13 * (1.0 + std::abs(x)));
    }
}

TEST(Fourier2, MeanLevelEqualsVarianceOnAverage) {
    const double sigma = 0.3;
    const std::size_t n = 512;
    f2::Config cfg;
    cfg.cutoff = n / 4;
    double a0 = 0.0;
    double mid = 0.0;
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
        const auto p = testsupport::brownian(n, kTwoPi, 1, {sigma}, 500 + r);
        const f2::Fit fit(p, cfg);
        a0 += fit.pair(0, 0).alpha0;
        mid += fit.at(std::numbers::pi, Kernel::fejer())(0, 0);
    }
    EXPECT_NEAR(a0 / reps, sigma * sigma, 0.05 * sigma * sigma);
    EXPECT_NEAR(mid / reps, sigma * sigma, 0.05 * sigma * sigma);
}

TEST(Fourier2, RecoversConstantCovarianceOnAverage) {
    const std::vector<double> b{0.4, 0.1, -0.2, 0.3};
    const auto want = testsupport::gram(2, b);
    f2::Config cfg;
    cfg.cutoff = 128;
    cfg.symmetrization = f2::Symmetrization::Convolution;
    spotvol::SymMatrix acc(2);
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
        const auto p = testsupport::brownian(512, 2.0, 2, b, 1300 + r);
        acc = acc + f2::Fit(p, cfg).at(1.0, Kernel::smoothed(0.1));
    }
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = u; v < 2; ++v)
            EXPECT_NEAR(acc(u, v) / reps, want(u, v), 0.06 * want(0, 0)) << u << v;
}

TEST(Fourier2, ErrorShrinksWithSampleSize) {
    // Mean squared error of the spot estimate at mid-horizon for constant sigma.
    const double sigma = 0.5;
    auto mse = [&](std::size_t n) {
        f2::Config cfg;
        cfg.cutoff = n / 4;
        double acc = 0.0;
        for (int r = 0; r < 100; ++r) {
            const auto p = testsupport::brownian(n, kTwoPi, 1, {sigma}, 7000 + r + n);
            const double e = f2::Fit(p, cfg).at(std::numbers::pi, Kernel::smoothed(0.05))(0, 0) -
                             sigma * sigma;
            acc += e * e;
        }
        return acc / 100.0;
    };
    EXPECT_LT(mse(1024), mse(128));
}

TEST(Fourier2, SeriesMatchesModuleFunction) {
    const auto p = random_path(64, 3, 3).with_horizon(2.0);
    f2::Config cfg;
    cfg.cutoff = 16;
    cfg.kernel = Kernel::smoothed(0.2);
    const std::vector<double> times{p.times()[1], p.times()[32], p.times()[63]};
    const auto s = f2::sigma_series_v2(p, cfg, times);
    const f2::Fit fit(p, cfg);
    ASSERT_EQ(s.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(s.points[k].sigma, fit.at(times[k], cfg.kernel));
}

TEST(Fourier2, ContractErrors) {
    const auto p = random_path(32, 2, 1);
    EXPECT_THROW(f2::increment_coeffs(p.with_horizon(1.0), 0, 4), spotvol::ContractViolation);
    const auto c = f2::increment_coeffs(p, 0, 6);
    EXPECT_THROW(f2::sigma_coeffs_unsymmetrized(c, c, 0.0, 0.0, 4), spotvol::ContractViolation);
    EXPECT_THROW(f2::sigma_coeffs_convolution(c, c, 0.0, 0.0, 0), spotvol::ContractViolation);
    f2::Config cfg;
    cfg.cutoff = 0;
    EXPECT_THROW(f2::Fit(p, cfg), spotvol::ContractViolation);
    cfg.cutoff = 4;
    EXPECT_THROW(f2::Fit(p, cfg).at(0.0, Kernel::fejer()), spotvol::ContractViolation);
}
