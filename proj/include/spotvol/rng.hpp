#pragma once

#include <cstdint>
#include <random>

namespace spotvol {

/// SplitMix64 finaliser; used to derive decorrelated sub-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for sub-stream `stream` of replication `replication` under `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replication,
                                    std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ replication) ^ (stream + 0x5bd1e995ULL));
}

/// Thin wrapper over mt19937_64 with the draws the simulator needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<std::uint64_t>(mean)(engine_);
    }

    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace spotvol
