#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spotvol/errors.hpp"
#include "spotvol/qv.hpp"
#include "support.hpp"

namespace qv = spotvol::qv;

namespace {

// 10 observations (9 increments), d = 2, hand-picked values.
spotvol::PathSample small_path() {
    const std::vector<double> x1{0.0, 0.3, 0.1, 0.4, 0.4, -0.2, 0.0, 0.5, 0.2, 0.6};
    const std::vector<double> x2{1.0, 0.8, 1.1, 1.3, 0.9, 1.0, 1.4, 1.2, 1.5, 1.1};
    std::vector<double> values;
    for (std::size_t i = 0; i < 10; ++i) {
        values.push_back(x1[i]);
        values.push_back(x2[i]);
    }
    return spotvol::PathSample::on_grid(0.9, 2, values);
}

// Display formula, enumerating increments by their endpoints.
double brute_qv(const spotvol::PathSample& p, std::size_t u, std::size_t v, double t, double h) {
    const double eps = 1e-9 * p.spacing();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.steps(); ++i) {
        if (p.times()[i] >= t - h - eps && p.times()[i + 1] <= t + h + eps)
            acc += (p(i + 1, u) - p(i, u)) * (p(i + 1, v) - p(i, v));
    }
    return acc / (2.0 * h);
}

double brute_bipower(const spotvol::PathSample& p, std::size_t u, std::size_t v, double t,
                     double h) {
    const double eps = 1e-9 * p.spacing();
    auto d = [&](std::size_t i, std::size_t j) { return p(i, j) - p(i - 1, j); };
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 <= p.steps(); ++i) {
        if (!(p.times()[i - 1] >= t - h - eps && p.times()[i + 1] <= t + h + eps)) continue;
        acc += std::abs((d(i, u) + d(i, v)) * (d(i + 1, u) + d(i + 1, v))) -
               std::abs(d(i, u) * d(i + 1, u)) - std::abs(d(i, v) * d(i + 1, v));
    }
    return std::numbers::pi / (8.0 * h) * acc;
}

}  // namespace

TEST(Qv, MatchesDisplayFormulaOnSmallPath) {
    const auto p = small_path();
    for (double h : {0.2, 0.3}) {
        const qv::QvEstimator est(p, {h, 0.5});
        for (double t : est.interior_grid_times()) {
            const auto m = est.at(t);
            for (std::size_t u = 0; u < 2; ++u)
                for (std::size_t v = 0; v < 2; ++v)
                    EXPECT_NEAR(m(u, v), brute_qv(p, u, v, t, h), 1e-14) << t;
        }
    }
}

TEST(Bipower, MatchesDisplayFormulaOnSmallPath) {
    const auto p = small_path();
    for (double h : {0.2, 0.3}) {
        const qv::BipowerEstimator est(p, {h, 0.5});
        for (double t : est.interior_grid_times()) {
            const auto m = est.at(t);
            for (std::size_t u = 0; u < 2; ++u)
                for (std::size_t v = 0; v < 2; ++v)
                    EXPECT_NEAR(m(u, v), brute_bipower(p, u, v, t, h), 1e-14) << t;
        }
    }
}

TEST(Qv, PureDriftClosedForm) {
    // X = mu t: every increment is mu * dt, so Sigma = mu^2 dt.
    const double mu = 1.7;
    const auto p = testsupport::from_function(100, 1.0, 1, [&](double t, std::size_t) { return mu * t; });
    const qv::QvEstimator est(p, {0.1, 0.5});
    EXPECT_NEAR(est.at(0.5)(0, 0), mu * mu * 0.01, 1e-13);
}

TEST(Qv, RankOneWhenComponentsAreCollinear) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> gauss;
    std::vector<double> values{0.0, 0.0};
    double x = 0.0;
    for (int i = 0; i < 200; ++i) {
        x += gauss(rng);
        values.push_back(x);
        values.push_back(-2.0 * x);
    }
    const auto p = spotvol::PathSample::on_grid(1.0, 2, values);
    const auto series = qv::QvEstimator(p, {0.1, 0.5}).series(std::vector<double>{0.5});
    const auto& s = series.points[0].spectrum;
    EXPECT_NEAR(s.min(), 0.0, 1e-12 * s.max());
    EXPECT_NEAR(series.points[0].sigma(0, 1), -2.0 * series.points[0].sigma(0, 0), 1e-9);
}

TEST(Bipower, DiagonalIsScaledAbsoluteProducts) {
    const auto p = testsupport::brownian(200, 1.0, 1, {1.0}, 4);
    const double h = 0.1;
    const qv::BipowerEstimator est(p, {h, 0.5});
    // Diagonal: pi/(8h) * (4 - 2) |D_i D_{i+1}| = pi/(4h) sum |D_i D_{i+1}|.
    const std::size_t lo = 40;  // window [0.2, 0.4] around t = 0.3, step 0.005
    const std::size_t hi = 80;
    double acc = 0.0;
    for (std::size_t i = lo + 1; i + 1 <= hi; ++i)
        acc += std::abs((p(i, 0) - p(i - 1, 0)) * (p(i + 1, 0) - p(i, 0)));
    EXPECT_NEAR(est.at(0.3)(0, 0), std::numbers::pi / (4.0 * h) * acc, 1e-12);
}

TEST(Qv, RecoversConstantCovarianceOnAverage) {
    const std::vector<double> b{0.5, 0.0, 0.2, 0.4};
    const auto want = testsupport::gram(2, b);
    spotvol::SymMatrix qv_acc(2);
    spotvol::SymMatrix bp_acc(2);
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        const auto p = testsupport::brownian(1000, 1.0, 2, b, 300 + r);
        qv_acc = qv_acc + qv::qv_estimate(p, {0.05, 0.5}, 0.5);
        bp_acc = bp_acc + qv::bipower_estimate(p, {0.05, 0.5}, 0.5);
    }
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = u; v < 2; ++v) {
            EXPECT_NEAR(qv_acc(u, v) / reps, want(u, v), 0.03 * want(0, 0));
            EXPECT_NEAR(bp_acc(u, v) / reps, want(u, v), 0.05 * want(0, 0));
        }
}

TEST(Qv, SingleJumpChangesEstimatesExactly) {
    const auto base = testsupport::brownian(100, 1.0, 1, {1.0}, 9);
    const std::size_t i0 = 50;  // jump inside increment (t_49, t_50]
    const double jump = 2.0;
    std::vector<double> v(base.values().begin(), base.values().end());
    for (std::size_t i = i0; i <= 100; ++i) v[i] += jump;
    const auto jumped = spotvol::PathSample::on_grid(1.0, 1, v);
    const double h = 0.1;
    const double t = 0.5;
    auto d = [&](std::size_t i) { return base(i, 0) - base(i - 1, 0); };

    const double dq = qv::qv_estimate(jumped, {h, 0.5}, t)(0, 0) - qv::qv_estimate(base, {h, 0.5}, t)(0, 0);
    EXPECT_NEAR(dq, ((d(i0) + jump) * (d(i0) + jump) - d(i0) * d(i0)) / (2.0 * h), 1e-12);

    const double db = qv::bipower_estimate(jumped, {h, 0.5}, t)(0, 0) -
                      qv::bipower_estimate(base, {h, 0.5}, t)(0, 0);
    const double bump = std::abs(d(i0) + jump) - std::abs(d(i0));
    const double want = std::numbers::pi / (4.0 * h) * bump *
                        (std::abs(d(i0 - 1)) + std::abs(d(i0 + 1)));
    EXPECT_NEAR(db, want, 1e-12);
    // The jump enters bipower linearly, QV quadratically.
    EXPECT_LT(std::abs(db), 0.5 * std::abs(dq));
}

TEST(Qv, DefaultBandwidths) {
    EXPECT_NEAR(qv::default_bandwidth(100, 1.0, 0.5), 0.1, 1e-15);
    EXPECT_NEAR(qv::default_bandwidth(1000, 2.0, 1.0), 2.0 * std::pow(1000.0, -1.0 / 3.0), 1e-15);
    EXPECT_NEAR(qv::JumpModelInfo::rate_bound(0.5, 0.0), 0.25, 1e-15);
    EXPECT_NEAR(qv::JumpModelInfo::rate_bound(0.5, 1.5), 0.5 / 3.0, 1e-15);
    const auto info = qv::JumpModelInfo::with_default_rate(0.5, 0.0);
    EXPECT_NEAR(info.rate_exponent, 0.225, 1e-15);
    EXPECT_NEAR(qv::jump_bandwidth(100, 1.0, info), std::pow(100.0, -0.45), 1e-15);
    EXPECT_NO_THROW(info.validate(0.5));
    EXPECT_THROW((qv::JumpModelInfo{2.0, 0.1}).validate(0.5), spotvol::ContractViolation);
    EXPECT_THROW((qv::JumpModelInfo{0.0, 0.3}).validate(0.5), spotvol::ContractViolation);
}

TEST(Qv, ShiftAndScale) {
    const auto p = testsupport::brownian(200, 1.0, 2, {1.0, 0.3, 0.0, 0.8}, 10);
    std::vector<double> shifted(p.values().begin(), p.values().end());
    std::vector<double> scaled = shifted;
    for (auto& x : shifted) x += 5.0;
    for (auto& x : scaled) x *= 3.0;
    const qv::Config cfg{0.1, 0.5};
    const auto a = qv::qv_estimate(p, cfg, 0.5);
    const auto b = qv::qv_estimate(spotvol::PathSample::on_grid(1.0, 2, shifted), cfg, 0.5);
    const auto c = qv::qv_estimate(spotvol::PathSample::on_grid(1.0, 2, scaled), cfg, 0.5);
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) {
            EXPECT_NEAR(b(u, v), a(u, v), 1e-11);
            EXPECT_NEAR(c(u, v), 9.0 * a(u, v), 1e-11);
        }
}

TEST(Qv, AlwaysPositiveSemidefinite) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss;
        std::vector<double> b(4 * 4);
        for (auto& x : b) x = gauss(rng);
        const auto p = testsupport::brownian(300, 1.0, 4, b, seed);
        const qv::QvEstimator est(p, {0.05, 0.5});
        for (const auto& pt : est.series(est.interior_grid_times()).points)
            EXPECT_GE(pt.spectrum.min(), -1e-12 * pt.spectrum.max());
    }
}

TEST(Qv, WindowValidity) {
    const auto p = testsupport::brownian(100, 1.0, 1, {1.0}, 1);
    const qv::QvEstimator est(p, {0.1, 0.5});
    EXPECT_TRUE(est.valid(0.1));
    EXPECT_TRUE(est.valid(0.9));
    EXPECT_FALSE(est.valid(0.09));
    EXPECT_EQ(est.interior_grid_times().size(), 81u);
    EXPECT_THROW(est.at(0.05), spotvol::OutOfWindowError);
    EXPECT_THROW(qv::QvEstimator(p, {0.5, 0.5}), spotvol::ContractViolation);
    EXPECT_THROW(qv::QvEstimator(p, {0.0, 0.5}), spotvol::ContractViolation);
    EXPECT_THROW(qv::QvEstimator(p, {0.1, 1.5}), spotvol::ContractViolation);
}

TEST(Qv, DegenerateWindows) {
    const auto p = testsupport::brownian(100, 1.0, 1, {1.0}, 1);
    // h < spacing holds no whole increment around a grid time.
    EXPECT_THROW(qv::qv_estimate(p, {0.006, 0.5}, 0.5), spotvol::DegenerateWindowError);
    EXPECT_NO_THROW(qv::qv_estimate(p, {0.01, 0.5}, 0.5));
    // Off the grid the same h covers exactly one increment: enough for QV only.
    EXPECT_NO_THROW(qv::qv_estimate(p, {0.006, 0.5}, 0.505));
    EXPECT_THROW(qv::bipower_estimate(p, {0.006, 0.5}, 0.505), spotvol::DegenerateWindowError);
    EXPECT_NO_THROW(qv::bipower_estimate(p, {0.01, 0.5}, 0.5));
}
