#include "r1c/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace r1c {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, Stream stream)
    : engine_(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("empty range");
    // rejection keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[below(i)]);
    return p;
}

std::vector<MultiIndex> random_observation_set(const Dims& dims, std::uint64_t seed) {
    if (dims.empty()) throw std::invalid_argument("dims must be nonempty");
    for (std::size_t d : dims)
        if (d == 0) throw std::invalid_argument("mode sizes must be positive");

    Rng perms(seed, Stream::Permutations);
    Rng ext(seed, Stream::Extensions);

    std::vector<MultiIndex> phi;
    phi.reserve(dims[0]);
    for (std::size_t i = 1; i <= dims[0]; ++i) phi.push_back(MultiIndex{i});

    for (std::size_t t = 1; t < dims.size(); ++t) {
        const std::size_t M = phi.size();
        const std::size_t N = dims[t];
        const std::size_t L = std::max(M, N);
        std::vector<std::size_t> is = perms.permutation(M);
        std::vector<std::size_t> js = perms.permutation(N);
        while (is.size() < L) is.push_back(ext.below(M));
        while (js.size() < L) js.push_back(ext.below(N));

        std::vector<MultiIndex> next;
        next.reserve(2 * L);
        auto edge = [&](std::size_t i, std::size_t j) {
            next.push_back(phi[i].insert(t, j + 1));
        };
        edge(is[0], js[0]);
        for (std::size_t l = 1; l < L; ++l) {
            edge(is[l], js[l - 1]);
            edge(is[l], js[l]);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        phi = std::move(next);
    }
    return phi;
}

PartialTensor RankOne::on(const Dims& dims, std::span<const MultiIndex> omega) const {
    std::vector<Entry> entries;
    entries.reserve(omega.size());
    for (const auto& idx : omega) entries.push_back({idx, at(idx)});
    return PartialTensor(dims, std::move(entries));
}

RankOne random_rank_one(const Dims& dims, std::uint64_t seed) {
    Rng rng(seed, Stream::Factors);
    RankOne out;
    for (std::size_t n : dims) {
        std::vector<double> u(n);
        for (double& x : u) x = rng.normal();
        out.factors.push_back(std::move(u));
    }
    return out;
}

PartialTensor perturb(const PartialTensor& exact, double eps, std::uint64_t seed) {
    if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
    if (eps == 0.0) return exact;
    Rng rng(seed, Stream::Noise);
    return exact.map_values(
        [&](const MultiIndex&, double v) { return v * (1.0 + eps * (2.0 * rng.uniform() - 1.0)); });
}

Instance make_instance(const GeneratorConfig& config) {
    const auto omega = random_observation_set(config.dims, config.seed);
    Instance inst;
    inst.truth = random_rank_one(config.dims, config.seed);
    inst.exact = inst.truth.on(config.dims, omega);
    inst.noisy = perturb(inst.exact, config.eps, config.seed);
    double s = 0.0;
    auto a = inst.exact.entries();
    auto b = inst.noisy.entries();
    for (std::size_t i = 0; i < a.size(); ++i) s += (b[i].value - a[i].value) * (b[i].value - a[i].value);
    inst.noise_norm = std::sqrt(s);
    return inst;
}

}  // namespace r1c
