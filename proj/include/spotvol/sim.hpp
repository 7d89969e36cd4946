#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spotvol/eig.hpp"
#include "spotvol/path.hpp"
#include "spotvol/rng.hpp"

/// Ground-truth generator: multi-factor Heston-type model with exact CIR
/// variance transitions, Euler prices and optional compound-Poisson jumps.
namespace spotvol::sim {

/**
 * One exact transition of dv = alpha (b - v) dt + sigma sqrt(v) dB over dt.
 *
 * v(t+dt) = c * chi'^2(df, nc) with c = sigma^2 (1 - e^{-alpha dt}) / (4 alpha),
 * df = 4 alpha b / sigma^2, nc = v e^{-alpha dt} / c, drawn as a
 * Poisson(nc/2) mixture of Gamma(df/2 + K, 2).
 */
double cir_exact_step(double v, double dt, double alpha, double b, double sigma, Rng& rng);

/**
 * dX_i = gamma_i dt + sum_j lambda_ij sqrt(v_j) dW_j
 * dv_j = alpha_j (b_j - v_j) dt + sigma_j sqrt(v_j) dB_j
 */
struct HestonSpec {
    std::size_t d = 1;
    std::size_t d1 = 1;
    std::vector<double> drift;           ///< gamma, size d
    std::vector<double> loadings;        ///< lambda, row-major d x d1
    std::vector<double> mean_reversion;  ///< alpha, size d1
    std::vector<double> long_run;        ///< b, size d1
    std::vector<double> vol_of_vol;      ///< sigma, size d1
    std::vector<double> v0;              ///< size d1
    std::vector<double> x0;              ///< size d
    double horizon = 1.0;                ///< T
    std::size_t grid_size = 100;         ///< N0

    double loading(std::size_t i, std::size_t j) const { return loadings[i * d1 + j]; }

    /// d = 5, d1 = 3, gamma_i = i/100, b_j = v_j(0) = j/100, alpha_j = 2,
    /// sigma_j = sqrt(2 b_j alpha_j), lambda_ij = (-1)^{i+j} sin(ij), X(0) = 1, T = 2 pi.
    static HestonSpec preset(std::size_t grid_size);

    /// Throws ContractViolation on inconsistent sizes or non-positive CIR parameters.
    void validate() const;

    /// Lambda diag(v) Lambda^T for one variance vector.
    SymMatrix sigma_for(const double* variances) const;
};

struct JumpSpec {
    enum class SizeKind { FixedVector, GaussianIid };

    double intensity = 0.0;  ///< jumps per unit time
    SizeKind size_kind = SizeKind::FixedVector;
    std::vector<double> fixed;  ///< size d, for FixedVector
    double stddev = 0.0;        ///< for GaussianIid

    void validate(std::size_t d) const;
};

/// Exact spot volatility along the simulation grid.
struct GroundTruth {
    std::vector<double> times;
    std::size_t d1 = 0;
    std::vector<double> variance;  ///< row-major (N0 + 1) x d1
    SpotMatrixSeries sigma;        ///< Sigma(t_k) with spectra, k = 0..N0

    double variance_at(std::size_t k, std::size_t j) const { return variance[k * d1 + j]; }
};

struct Simulation {
    PathSample path;
    GroundTruth truth;
    std::size_t jump_count = 0;
};

/// Sub-stream ids; each draws from derive_seed(seed, replication, id).
enum class Stream : std::uint64_t { Prices = 1, Variance = 2, Jumps = 3 };

/// Simulates one replication. Identical (spec, jumps, seed, replication)
/// gives bit-identical output.
Simulation simulate_heston(const HestonSpec& spec, const std::optional<JumpSpec>& jumps,
                           std::uint64_t seed, std::uint64_t replication = 0);

/// Sorted eigenvalues of the true Sigma at a grid time; LookupError off-grid.
Spectrum true_spectrum_at(const GroundTruth& truth, double t);

}  // namespace spotvol::sim
