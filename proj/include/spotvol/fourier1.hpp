#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spotvol/eig.hpp"
#include "spotvol/fourier.hpp"
#include "spotvol/path.hpp"

/// First Fourier-series spot volatility scheme: path coefficients by summation
/// by parts, Bohr convolution over frequencies n0..N, Fejer-type reconstruction.
namespace spotvol::fourier1 {

using fourier::FourierCoeffs;
using fourier::Kernel;

struct Config {
    std::size_t cutoff = 1;  ///< N
    std::size_t n0 = 1;      ///< lowest frequency used in the Bohr averages
    Kernel kernel;

    /// Throws ContractViolation unless cutoff >= 1 and n0 <= cutoff.
    void validate() const;
};

/**
 * Coefficients a_k(dX_j), b_k(dX_j), k = 0..max_freq, of a path observed on
 * t_i = 2*pi*i/n:
 *
 *   a_k = (1/pi) sum_i (cos(k t_{i-1}) - cos(k t_i)) X_j(t_{i-1}) + (1/pi)(X_j(t_n) - X_j(t_0))
 *   b_k = (1/pi) sum_i (sin(k t_{i-1}) - sin(k t_i)) X_j(t_{i-1})
 *
 * The path must already live on [0, 2*pi].
 */
FourierCoeffs path_fourier_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq);

/// Same, reusing a unit-root table built for path.steps().
FourierCoeffs path_fourier_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq,
                                  const fourier::UnitRootTable& table);

/// Fourier coefficients of one cross volatility Sigma_uv, k = 0..N.
struct SigmaCoeffs {
    std::vector<double> a;
    std::vector<double> b;
};

/// Bohr convolution of the path coefficients of components u and v.
/// Needs both inputs built up to frequency 2N.
SigmaCoeffs sigma_fourier_coeffs(const FourierCoeffs& cu, const FourierCoeffs& cv,
                                 const Config& cfg);

/// SigmaCoeffs for every pair u <= v of a d-dimensional path.
class PairCoefficients {
public:
    PairCoefficients(std::size_t dim, std::vector<SigmaCoeffs> upper);

    std::size_t dim() const noexcept { return dim_; }
    const SigmaCoeffs& operator()(std::size_t u, std::size_t v) const;

private:
    std::size_t dim_;
    std::vector<SigmaCoeffs> upper_;
};

/// sum_k w(k) (a_k cos(kt) + b_k sin(kt)) for every pair, t in (0, 2*pi).
SymMatrix reconstruct_sigma(const PairCoefficients& coeffs, const Config& cfg, double t);

/**
 * Whole-path estimator for an arbitrary horizon T.
 *
 * Maps the path onto [0, 2*pi], computes the pair coefficients once, and
 * reconstructs at any t in (0, T) under any kernel. Outputs are in the
 * original time units (rescaled estimate times 2*pi/T). Immutable.
 */
class Fit {
public:
    /// cfg.kernel is ignored here; pass the kernel to at()/series().
    Fit(const PathSample& path, const Config& cfg);

    SymMatrix at(double t, const Kernel& kernel) const;
    SpotMatrixSeries series(const Kernel& kernel, std::span<const double> times) const;

    const PairCoefficients& coefficients() const noexcept { return coeffs_; }

private:
    Config cfg_;
    double horizon_;
    PathSample path_;
    PairCoefficients coeffs_;
};

SpotMatrixSeries sigma_series(const PathSample& path, const Config& cfg,
                              std::span<const double> times);

}  // namespace spotvol::fourier1
