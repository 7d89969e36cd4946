#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spotvol/errors.hpp"
#include "spotvol/sim.hpp"

namespace sim = spotvol::sim;

namespace {

struct CirMoments {
    double mean;
    double var;
};

CirMoments cir_closed_form(double v, double dt, double alpha, double b, double sigma) {
    const double e = std::exp(-alpha * dt);
    return {v * e + b * (1.0 - e),
            v * sigma * sigma * e * (1.0 - e) / alpha +
                b * sigma * sigma * (1.0 - e) * (1.0 - e) / (2.0 * alpha)};
}

CirMoments sample_moments(double v, double dt, double alpha, double b, double sigma, int draws,
                          std::uint64_t seed) {
    spotvol::Rng rng(seed);
    double s = 0.0;
    double ss = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = sim::cir_exact_step(v, dt, alpha, b, sigma, rng);
        s += x;
        ss += x * x;
    }
    const double mean = s / draws;
    return {mean, ss / draws - mean * mean};
}

}  // namespace

TEST(Sim, CirConditionalMoments) {
    for (double dt : {2.0 * std::numbers::pi / 1000.0, 0.5}) {
        for (double v : {0.01, 0.003, 0.05}) {
            const auto want = cir_closed_form(v, dt, 2.0, 0.01, 0.2);
            const auto got = sample_moments(v, dt, 2.0, 0.01, 0.2, 100000, 42);
            EXPECT_NEAR(got.mean, want.mean, 0.01 * want.mean) << v << " " << dt;
            EXPECT_NEAR(got.var, want.var, 0.02 * want.var) << v << " " << dt;
        }
    }
}

TEST(Sim, CirStaysPositive) {
    // Feller condition holds with equality at the preset (2 alpha b = sigma^2).
    spotvol::Rng rng(7);
    double v = 0.01;
    for (int i = 0; i < 1000000; ++i) {
        v = sim::cir_exact_step(v, 1e-3, 2.0, 0.01, 0.2, rng);
        ASSERT_GT(v, 0.0) << i;
    }
}

TEST(Sim, CirRejectsBadParameters) {
    spotvol::Rng rng(1);
    EXPECT_THROW(sim::cir_exact_step(0.0, 0.1, 2.0, 0.01, 0.2, rng), spotvol::ContractViolation);
    EXPECT_THROW(sim::cir_exact_step(0.1, 0.1, 2.0, 0.01, 0.0, rng), spotvol::ContractViolation);
}

TEST(Sim, HestonPreset) {
    const auto s = sim::HestonSpec::preset(1000);
    EXPECT_EQ(s.d, 5u);
    EXPECT_EQ(s.d1, 3u);
    EXPECT_DOUBLE_EQ(s.horizon, 2.0 * std::numbers::pi);
    EXPECT_DOUBLE_EQ(s.drift[2], 0.03);
    EXPECT_DOUBLE_EQ(s.long_run[1], 0.02);
    EXPECT_DOUBLE_EQ(s.v0[2], 0.03);
    EXPECT_DOUBLE_EQ(s.mean_reversion[0], 2.0);
    EXPECT_DOUBLE_EQ(s.vol_of_vol[0], 0.2);
    // lambda_ij = (-1)^{i+j} sin(ij), 1-based.
    EXPECT_DOUBLE_EQ(s.loading(0, 0), std::sin(1.0));
    EXPECT_DOUBLE_EQ(s.loading(1, 2), -std::sin(6.0));
    EXPECT_DOUBLE_EQ(s.loading(4, 1), -std::sin(10.0));
    EXPECT_NO_THROW(s.validate());
}

TEST(Sim, TruthHasRankOfFactorCount) {
    const auto out = sim::simulate_heston(sim::HestonSpec::preset(200), std::nullopt, 3);
    ASSERT_EQ(out.truth.sigma.size(), 201u);
    for (const auto& p : out.truth.sigma.points) {
        const auto& s = p.spectrum.values;
        EXPECT_GT(s[2], 0.0);
        EXPECT_NEAR(s[3], 0.0, 1e-12 * s[0]);
        EXPECT_NEAR(s[4], 0.0, 1e-12 * s[0]);
    }
}

TEST(Sim, TrueSpectrumLookup) {
    const auto out = sim::simulate_heston(sim::HestonSpec::preset(100), std::nullopt, 3);
    const double dt = 2.0 * std::numbers::pi / 100.0;
    EXPECT_EQ(sim::true_spectrum_at(out.truth, 0.0).values, out.truth.sigma.points[0].spectrum.values);
    EXPECT_EQ(sim::true_spectrum_at(out.truth, 37 * dt).values,
              out.truth.sigma.points[37].spectrum.values);
    EXPECT_EQ(sim::true_spectrum_at(out.truth, 2.0 * std::numbers::pi).values,
              out.truth.sigma.points[100].spectrum.values);
    EXPECT_THROW(sim::true_spectrum_at(out.truth, 0.5 * dt), spotvol::LookupError);
    EXPECT_THROW(sim::true_spectrum_at(out.truth, -dt), spotvol::LookupError);
    EXPECT_THROW(sim::true_spectrum_at(out.truth, 7.0), spotvol::LookupError);
}

TEST(Sim, Reproducible) {
    const auto spec = sim::HestonSpec::preset(300);
    const auto a = sim::simulate_heston(spec, std::nullopt, 99, 4);
    const auto b = sim::simulate_heston(spec, std::nullopt, 99, 4);
    const auto c = sim::simulate_heston(spec, std::nullopt, 99, 5);
    EXPECT_EQ(a.path, b.path);
    EXPECT_EQ(a.truth.variance, b.truth.variance);
    EXPECT_FALSE(a.path == c.path);
}

TEST(Sim, ZeroLoadingsGiveDeterministicDrift) {
    auto spec = sim::HestonSpec::preset(50);
    for (auto& l : spec.loadings) l = 0.0;
    const auto out = sim::simulate_heston(spec, std::nullopt, 1);
    for (std::size_t k = 0; k <= 50; ++k)
        for (std::size_t i = 0; i < 5; ++i)
            EXPECT_NEAR(out.path(k, i), 1.0 + spec.drift[i] * out.path.times()[k], 1e-13);
    for (const auto& p : out.truth.sigma.points) EXPECT_EQ(p.spectrum.max(), 0.0);
}

TEST(Sim, FixedJumpsShiftTheEndpoint) {
    const auto spec = sim::HestonSpec::preset(500);
    sim::JumpSpec jumps;
    jumps.intensity = 1.0;
    jumps.fixed.assign(5, 0.5);
    const auto plain = sim::simulate_heston(spec, std::nullopt, 11);
    const auto jumped = sim::simulate_heston(spec, jumps, 11);
    EXPECT_GT(jumped.jump_count, 0u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(jumped.path(500, i) - plain.path(500, i),
                    0.5 * static_cast<double>(jumped.jump_count), 1e-12);
    }
    EXPECT_EQ(plain.truth.variance, jumped.truth.variance);

    jumps.intensity = 0.0;
    EXPECT_EQ(sim::simulate_heston(spec, jumps, 11).path, plain.path);
}

TEST(Sim, JumpCountMatchesIntensity) {
    const auto spec = sim::HestonSpec::preset(100);
    sim::JumpSpec jumps;
    jumps.intensity = 1.0;
    jumps.size_kind = sim::JumpSpec::SizeKind::GaussianIid;
    jumps.stddev = 0.1;
    double total = 0.0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r)
        total += static_cast<double>(sim::simulate_heston(spec, jumps, 5, r).jump_count);
    const double want = 2.0 * std::numbers::pi;
    EXPECT_NEAR(total / reps, want, 4.0 * std::sqrt(want / reps));
}

TEST(Sim, EulerMeanMatchesDrift) {
    // E X_i(T) = X_i(0) + gamma_i T: the diffusion part is a martingale.
    const auto spec = sim::HestonSpec::preset(100);
    std::vector<double> acc(5, 0.0);
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
        const auto out = sim::simulate_heston(spec, std::nullopt, 77, r);
        for (std::size_t i = 0; i < 5; ++i) acc[i] += out.path(100, i);
    }
    for (std::size_t i = 0; i < 5; ++i) {
        const double want = 1.0 + spec.drift[i] * spec.horizon;
        // sd of X_i(T) is below 0.5 at the preset; 4 standard errors.
        EXPECT_NEAR(acc[i] / reps, want, 4.0 * 0.5 / std::sqrt(reps)) << i;
    }
}

TEST(Sim, ValidationErrors) {
    auto spec = sim::HestonSpec::preset(10);
    spec.loadings.pop_back();
    EXPECT_THROW(spec.validate(), spotvol::ContractViolation);
    spec = sim::HestonSpec::preset(10);
    spec.long_run[0] = 0.0;
    EXPECT_THROW(sim::simulate_heston(spec, std::nullopt, 1), spotvol::ContractViolation);
    spec = sim::HestonSpec::preset(10);
    sim::JumpSpec bad;
    bad.intensity = 1.0;
    bad.fixed = {1.0};
    EXPECT_THROW(sim::simulate_heston(spec, bad, 1), spotvol::ContractViolation);
}
