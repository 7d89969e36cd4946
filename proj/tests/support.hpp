#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "spotvol/eig.hpp"
#include "spotvol/path.hpp"

namespace testsupport {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// X(t_i) = f(t_i) componentwise on a regular grid of n steps over [0, T].
inline spotvol::PathSample from_function(std::size_t n, double horizon, std::size_t dim,
                                         const std::function<double(double, std::size_t)>& f) {
    std::vector<double> values;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = horizon * static_cast<double>(i) / static_cast<double>(n);
        for (std::size_t j = 0; j < dim; ++j) values.push_back(f(t, j));
    }
    return spotvol::PathSample::on_grid(horizon, dim, std::move(values));
}

/// Brownian path with constant diffusion matrix B (row-major dim x factors).
inline spotvol::PathSample brownian(std::size_t n, double horizon, std::size_t dim,
                                    const std::vector<double>& b, std::uint64_t seed) {
    const std::size_t factors = b.size() / dim;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const double sd = std::sqrt(horizon / static_cast<double>(n));
    std::vector<double> values(dim, 0.0);
    std::vector<double> z(factors);
    for (std::size_t i = 1; i <= n; ++i) {
        for (auto& zj : z) zj = gauss(rng) * sd;
        for (std::size_t u = 0; u < dim; ++u) {
            double inc = 0.0;
            for (std::size_t j = 0; j < factors; ++j) inc += b[u * factors + j] * z[j];
            values.push_back(values[(i - 1) * dim + u] + inc);
        }
    }
    return spotvol::PathSample::on_grid(horizon, dim, std::move(values));
}

/// B B^T for row-major B.
inline spotvol::SymMatrix gram(std::size_t dim, const std::vector<double>& b) {
    const std::size_t factors = b.size() / dim;
    spotvol::SymMatrix out(dim);
    for (std::size_t u = 0; u < dim; ++u)
        for (std::size_t v = u; v < dim; ++v) {
            double acc = 0.0;
            for (std::size_t j = 0; j < factors; ++j) acc += b[u * factors + j] * b[v * factors + j];
            out.set(u, v, acc);
        }
    return out;
}

inline spotvol::SymMatrix random_sym(std::size_t dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    spotvol::SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) m.set(i, j, unif(rng));
    return m;
}

}  // namespace testsupport
