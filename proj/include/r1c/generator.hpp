#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "r1c/tensor.hpp"

namespace r1c {

/// Independent random streams derived from one seed.
enum class Stream : std::uint64_t { Permutations = 1, Extensions = 2, Factors = 3, Noise = 4 };

/// mt19937_64 seeded through splitmix64 of (seed, stream). The distributions
/// are written out by hand so draws do not depend on the standard library's
/// implementation of std::uniform_real_distribution and friends.
class Rng {
public:
    Rng(std::uint64_t seed, Stream stream);

    double uniform();                       ///< [0, 1), 53 random bits
    double normal();                        ///< standard normal, Box-Muller
    std::size_t below(std::size_t n);       ///< uniform in [0, n)
    std::vector<std::size_t> permutation(std::size_t n);  ///< Fisher-Yates over 0..n-1

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Observation set built mode by mode: each new mode is attached to the
/// previous index set along a random path through the bipartite graph, so
/// every level of the recursion sees a connected pattern. Sorted, no duplicates.
std::vector<MultiIndex> random_observation_set(const Dims& dims, std::uint64_t seed);

struct RankOne {
    std::vector<std::vector<double>> factors;

    double at(const MultiIndex& idx) const { return outer_entry(factors, idx); }
    PartialTensor on(const Dims& dims, std::span<const MultiIndex> omega) const;
};

/// Standard normal factors.
RankOne random_rank_one(const Dims& dims, std::uint64_t seed);

/// Multiply every observed entry by (1 + eps * r), r uniform on [-1, 1].
PartialTensor perturb(const PartialTensor& exact, double eps, std::uint64_t seed);

struct GeneratorConfig {
    Dims dims;
    std::uint64_t seed = 0;
    double eps = 0.0;
};

struct Instance {
    RankOne truth;
    PartialTensor exact;
    PartialTensor noisy;
    double noise_norm = 0.0;  ///< ||noisy - exact||_Omega
};

Instance make_instance(const GeneratorConfig& config);

}  // namespace r1c
