#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spotvol/eig.hpp"
#include "spotvol/fourier.hpp"
#include "spotvol/path.hpp"

/// Second Fourier-series scheme: complex Bohr convolution of increment
/// coefficients, written in real form, with two ways to symmetrize.
namespace spotvol::fourier2 {

using fourier::FourierCoeffs;
using fourier::Kernel;

enum class Symmetrization {
    PostHoc,      ///< compute the (j1, j2) estimate for j1 <= j2 and mirror it
    Convolution,  ///< average the convolution over both orders of the pair
};

struct Config {
    std::size_t cutoff = 1;  ///< N
    Kernel kernel;
    Symmetrization symmetrization = Symmetrization::PostHoc;

    void validate() const;
};

/**
 * a_s = sum_i cos(s t_i) delta_i, b_s = sum_i sin(s t_i) delta_i with
 * delta_i = X_j(t_{i+1}) - X_j(t_i), s = 0..max_freq. No 1/pi prefactor.
 */
FourierCoeffs increment_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq);

FourierCoeffs increment_coeffs(const PathSample& path, std::size_t j, std::size_t max_freq,
                               const fourier::UnitRootTable& table);

/// alpha_0 plus real-form coefficients a_k, b_k for k = 1..N (index 0 unused, zero).
struct SigmaCoeffs {
    double alpha0 = 0.0;
    std::vector<double> a;
    std::vector<double> b;
};

/**
 * Ordered-pair coefficients of Sigma^{j1 j2}. `increment1` / `increment2`
 * are X^{j}(2 pi) - X^{j}(0) for the two components. Not symmetric in
 * (j1, j2) in general.
 */
SigmaCoeffs sigma_coeffs_unsymmetrized(const FourierCoeffs& c1, const FourierCoeffs& c2,
                                       double increment1, double increment2,
                                       std::size_t cutoff);

/// Symmetric coefficients from the pair-averaged convolution.
SigmaCoeffs sigma_coeffs_convolution(const FourierCoeffs& c1, const FourierCoeffs& c2,
                                     double increment1, double increment2, std::size_t cutoff);

/// alpha_0 + sum_{k=1}^N w(k) (a_k cos(kt) + b_k sin(kt)).
double evaluate(const SigmaCoeffs& c, const fourier::WeightedTrigRow& row);

/**
 * Whole-path estimator for an arbitrary horizon, same conventions as
 * fourier1::Fit: rescale to [0, 2*pi], convolve once, reconstruct on demand.
 */
class Fit {
public:
    Fit(const PathSample& path, const Config& cfg);

    SymMatrix at(double t, const Kernel& kernel) const;
    SpotMatrixSeries series(const Kernel& kernel, std::span<const double> times) const;

    /// Coefficients of the pair u <= v as used by the chosen symmetrization.
    const SigmaCoeffs& pair(std::size_t u, std::size_t v) const;

private:
    Config cfg_;
    double horizon_;
    PathSample path_;
    std::vector<SigmaCoeffs> upper_;
};

SpotMatrixSeries sigma_series_v2(const PathSample& path, const Config& cfg,
                                 std::span<const double> times);

}  // namespace spotvol::fourier2
