#include "spotvol/sim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spotvol/errors.hpp"

namespace spotvol::sim {

double cir_exact_step(double v, double dt, double alpha, double b, double sigma, Rng& rng) {
    if (!(v > 0.0 && dt > 0.0 && alpha > 0.0 && b > 0.0 && sigma > 0.0)) {
        throw ContractViolation("cir_exact_step: v, dt, alpha, b, sigma must all be > 0");
    }
    const double decay = std::exp(-alpha * dt);
    const double c = sigma * sigma * (1.0 - decay) / (4.0 * alpha);
    const double df = 4.0 * alpha * b / (sigma * sigma);
    const double nc = v * decay / c;
    const auto mixing = rng.poisson(0.5 * nc);
    return c * rng.gamma(0.5 * df + static_cast<double>(mixing), 2.0);
}

HestonSpec HestonSpec::preset(std::size_t grid_size) {
    HestonSpec s;
    s.d = 5;
    s.d1 = 3;
    s.horizon = 2.0 * std::numbers::pi;
    s.grid_size = grid_size;
    for (std::size_t i = 1; i <= s.d; ++i) {
        s.drift.push_back(static_cast<double>(i) / 100.0);
        s.x0.push_back(1.0);
        for (std::size_t j = 1; j <= s.d1; ++j) {
            const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
            s.loadings.push_back(sign * std::sin(static_cast<double>(i * j)));
        }
    }
    for (std::size_t j = 1; j <= s.d1; ++j) {
        const double b = static_cast<double>(j) / 100.0;
        const double alpha = 2.0;
        s.mean_reversion.push_back(alpha);
        s.long_run.push_back(b);
        s.v0.push_back(b);
        s.vol_of_vol.push_back(std::sqrt(2.0 * b * alpha));
    }
    return s;
}

void HestonSpec::validate() const {
    auto fail = [](const std::string& what) { throw ContractViolation("HestonSpec: " + what); };
    if (d == 0 || d1 == 0) fail("d and d1 must be positive");
    if (drift.size() != d || x0.size() != d) fail("drift and x0 must have d entries");
    if (loadings.size() != d * d1) fail("loadings must be d x d1");
    if (mean_reversion.size() != d1 || long_run.size() != d1 || vol_of_vol.size() != d1 ||
        v0.size() != d1) {
        fail("variance parameters must have d1 entries");
    }
    for (std::size_t j = 0; j < d1; ++j) {
        if (!(mean_reversion[j] > 0.0 && long_run[j] > 0.0 && v0[j] > 0.0 &&
              vol_of_vol[j] > 0.0)) {
            fail("alpha, b, sigma and v0 must be positive (factor " + std::to_string(j + 1) + ")");
        }
    }
    if (!(horizon > 0.0)) fail("horizon must be positive");
    if (grid_size < 2) fail("grid size must be >= 2");
}

SymMatrix HestonSpec::sigma_for(const double* variances) const {
    SymMatrix out(d);
    for (std::size_t u = 0; u < d; ++u) {
        for (std::size_t v = u; v < d; ++v) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d1; ++j) acc += loading(u, j) * variances[j] * loading(v, j);
            out.set(u, v, acc);
        }
    }
    return out;
}

void JumpSpec::validate(std::size_t d) const {
    if (!(intensity >= 0.0)) throw ContractViolation("JumpSpec: intensity must be >= 0");
    if (size_kind == SizeKind::FixedVector && fixed.size() != d) {
        throw ContractViolation("JumpSpec: fixed jump vector must have d entries");
    }
    if (size_kind == SizeKind::GaussianIid && !(stddev >= 0.0)) {
        throw ContractViolation("JumpSpec: stddev must be >= 0");
    }
}

Simulation simulate_heston(const HestonSpec& spec, const std::optional<JumpSpec>& jumps,
                           std::uint64_t seed, std::uint64_t replication) {
    spec.validate();
    if (jumps) jumps->validate(spec.d);

    const std::size_t d = spec.d;
    const std::size_t d1 = spec.d1;
    const std::size_t n0 = spec.grid_size;
    const double dt = spec.horizon / static_cast<double>(n0);
    const double sqrt_dt = std::sqrt(dt);

    Rng price_rng(derive_seed(seed, replication, static_cast<std::uint64_t>(Stream::Prices)));
    Rng var_rng(derive_seed(seed, replication, static_cast<std::uint64_t>(Stream::Variance)));

    GroundTruth truth;
    truth.d1 = d1;
    truth.times.resize(n0 + 1);
    truth.variance.resize((n0 + 1) * d1);
    std::vector<double> x((n0 + 1) * d);

    for (std::size_t j = 0; j < d1; ++j) truth.variance[j] = spec.v0[j];
    for (std::size_t i = 0; i < d; ++i) x[i] = spec.x0[i];

    std::vector<double> z(d1);
    std::vector<double> vol(d1);
    for (std::size_t k = 0; k < n0; ++k) {
        const double* v_now = &truth.variance[k * d1];
        double* v_next = &truth.variance[(k + 1) * d1];
        for (std::size_t j = 0; j < d1; ++j) {
            z[j] = price_rng.normal();
            vol[j] = std::sqrt(v_now[j]);
            v_next[j] = cir_exact_step(v_now[j], dt, spec.mean_reversion[j], spec.long_run[j],
                                       spec.vol_of_vol[j], var_rng);
        }
        for (std::size_t i = 0; i < d; ++i) {
            double diffusion = 0.0;
            for (std::size_t j = 0; j < d1; ++j) diffusion += spec.loading(i, j) * vol[j] * z[j];
            x[(k + 1) * d + i] = x[k * d + i] + spec.drift[i] * dt + sqrt_dt * diffusion;
        }
    }

    std::size_t jump_count = 0;
    if (jumps && jumps->intensity > 0.0) {
        Rng jump_rng(derive_seed(seed, replication, static_cast<std::uint64_t>(Stream::Jumps)));
        jump_count = jump_rng.poisson(jumps->intensity * spec.horizon);
        // Per-cell jump totals, then accumulated into the levels.
        std::vector<double> cell_jumps(n0 * d, 0.0);
        for (std::size_t m = 0; m < jump_count; ++m) {
            const double when = jump_rng.uniform() * spec.horizon;
            const auto cell = std::min<std::size_t>(static_cast<std::size_t>(when / dt), n0 - 1);
            for (std::size_t i = 0; i < d; ++i) {
                const double size = jumps->size_kind == JumpSpec::SizeKind::FixedVector
                                        ? jumps->fixed[i]
                                        : jumps->stddev * jump_rng.normal();
                cell_jumps[cell * d + i] += size;
            }
        }
        std::vector<double> carried(d, 0.0);
        for (std::size_t k = 0; k < n0; ++k) {
            for (std::size_t i = 0; i < d; ++i) {
                carried[i] += cell_jumps[k * d + i];
                x[(k + 1) * d + i] += carried[i];
            }
        }
    }

    truth.sigma.points.reserve(n0 + 1);
    for (std::size_t k = 0; k <= n0; ++k) {
        truth.times[k] = spec.horizon * static_cast<double>(k) / static_cast<double>(n0);
        truth.sigma.push(truth.times[k], k, spec.sigma_for(&truth.variance[k * d1]));
    }
    truth.times.back() = spec.horizon;
    truth.sigma.points.back().time = spec.horizon;

    PathSample path = PathSample::on_grid(spec.horizon, d, std::move(x));
    return Simulation{std::move(path), std::move(truth), jump_count};
}

Spectrum true_spectrum_at(const GroundTruth& truth, double t) {
    if (truth.times.size() < 2) throw LookupError("ground truth has no grid");
    const double horizon = truth.times.back();
    const double step = horizon / static_cast<double>(truth.times.size() - 1);
    const double pos = std::round(t / step);
    if (pos < 0.0 || pos >= static_cast<double>(truth.times.size()) ||
        std::abs(truth.times[static_cast<std::size_t>(pos)] - t) > 1e-9 * step) {
        throw LookupError("time " + std::to_string(t) + " is not on the simulation grid");
    }
    return truth.sigma.points[static_cast<std::size_t>(pos)].spectrum;
}

}  // namespace spotvol::sim
