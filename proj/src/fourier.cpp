#include "spotvol/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spotvol/errors.hpp"
#include "spotvol/path.hpp"

namespace spotvol::fourier {

Kernel Kernel::smoothed(double delta) {
    if (!(delta > 0.0)) throw ContractViolation("smoothed Fejer kernel needs delta > 0");
    return Kernel{Type::SmoothedFejer, delta};
}

double Kernel::weight(std::size_t k, std::size_t cutoff) const {
    if (type == Type::Fejer) {
        return 1.0 - static_cast<double>(k) / static_cast<double>(cutoff);
    }
    if (k == 0) return 1.0;
    const double x = delta * static_cast<double>(k);
    const double s = std::sin(x) / x;
    return s * s;
}

std::string Kernel::describe() const {
    if (type == Type::Fejer) return "fejer";
    std::ostringstream os;
    os << "smoothed(delta=" << delta << ")";
    return os.str();
}

double delta_ladder(std::size_t ladder_index, double horizon, std::size_t grid_size) {
    if (ladder_index < 1 || ladder_index > 4) {
        throw ContractViolation("delta ladder index must be in 1..4");
    }
    const double exponent = -0.1 * static_cast<double>(ladder_index + 2);
    return horizon * std::pow(static_cast<double>(grid_size), exponent);
}

UnitRootTable::UnitRootTable(std::size_t n) : cos_(n), sin_(n) {
    if (n == 0) throw ContractViolation("UnitRootTable: n must be positive");
    for (std::size_t m = 0; m < n; ++m) {
        const double angle = kTwoPi * static_cast<double>(m) / static_cast<double>(n);
        cos_[m] = std::cos(angle);
        sin_[m] = std::sin(angle);
    }
}

void require_two_pi_horizon(const PathSample& path, const char* op) {
    if (std::abs(path.horizon() - kTwoPi) > 1e-9 * kTwoPi) {
        throw ContractViolation(std::string(op) + ": path must be rescaled to [0, 2*pi]");
    }
}

void require_component(const PathSample& path, std::size_t j, std::size_t max_freq,
                       const char* op) {
    if (j >= path.dim()) throw ContractViolation(std::string(op) + ": component out of range");
    if (max_freq == 0) throw ContractViolation(std::string(op) + ": max_freq must be >= 1");
}

std::size_t nyquist_cutoff(std::size_t steps) {
    return std::max<std::size_t>(1, steps / 4);
}

WeightedTrigRow::WeightedTrigRow(const Kernel& kernel, std::size_t cutoff, double t)
    : cos_w(cutoff + 1), sin_w(cutoff + 1) {
    for (std::size_t k = 0; k <= cutoff; ++k) {
        const double w = kernel.weight(k, cutoff);
        const double angle = static_cast<double>(k) * t;
        cos_w[k] = w * std::cos(angle);
        sin_w[k] = w * std::sin(angle);
    }
}

}  // namespace spotvol::fourier
