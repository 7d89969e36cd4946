#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spotvol/eig.hpp"

namespace spotvol {
class PathSample;
}

namespace spotvol::fourier {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Reconstruction weights applied to the k-th Fourier term.
struct Kernel {
    enum class Type { Fejer, SmoothedFejer };

    Type type = Type::Fejer;
    double delta = 0.0;  ///< only meaningful for SmoothedFejer

    static Kernel fejer() { return {}; }
    /// sin^2(delta k) / (delta k)^2 weights; throws ContractViolation unless delta > 0.
    static Kernel smoothed(double delta);

    /// w(k) for cutoff N: 1 - k/N (Fejer) or sin^2(dk)/(dk)^2 with w(0) = 1.
    double weight(std::size_t k, std::size_t cutoff) const;

    std::string describe() const;
};

/// delta_i = T * N0^(-0.1 (i + 2)), i = 1..4: the smoothed-kernel ladder.
double delta_ladder(std::size_t ladder_index, double horizon, std::size_t grid_size);

/**
 * cos/sin of 2*pi*m/n for m = 0..n-1.
 *
 * On the grid t_i = 2*pi*i/n every cos(k t_i) is table[(k*i) mod n], so one
 * O(n) table serves every frequency. Immutable; share freely across threads.
 */
class UnitRootTable {
public:
    explicit UnitRootTable(std::size_t n);

    std::size_t n() const noexcept { return cos_.size(); }
    double cos_at(std::size_t m) const noexcept { return cos_[m]; }
    double sin_at(std::size_t m) const noexcept { return sin_[m]; }

private:
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Trigonometric coefficients of the increments of one path component,
/// frequencies 0..max_freq.
struct FourierCoeffs {
    std::size_t component = 0;
    std::vector<double> cosine;
    std::vector<double> sine;

    std::size_t max_freq() const noexcept { return cosine.size() - 1; }
};

/// Throws ContractViolation unless the path horizon is 2*pi (within 1e-9).
void require_two_pi_horizon(const PathSample& path, const char* op);

/// Throws ContractViolation unless 1 <= max_freq and component < dim.
void require_component(const PathSample& path, std::size_t j, std::size_t max_freq,
                       const char* op);

/// Cutoff N at the Nyquist rule 2N = n/2; at least 1.
std::size_t nyquist_cutoff(std::size_t steps);

/// cos(k t) and sin(k t), k = 0..cutoff, each premultiplied by the kernel weight.
struct WeightedTrigRow {
    std::vector<double> cos_w;
    std::vector<double> sin_w;

    WeightedTrigRow(const Kernel& kernel, std::size_t cutoff, double t);
};

}  // namespace spotvol::fourier
