#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace greenmig {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a seed and any number of keys into one stream seed, so that draws
/// keyed by (seed, site, time, ...) are reproducible without shared state.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t h = mix64(seed);
    for (const std::uint64_t k : keys) {
        h = mix64(h ^ k);
    }
    return h;
}

/// Normal(mean, sd) conditioned on the result being >= floor (rejection).
template <class Engine>
double truncated_normal(Engine& rng, double mean, double sd, double floor)
{
    if (sd == 0.0) {
        return mean < floor ? floor : mean;
    }
    std::normal_distribution<double> dist(mean, sd);
    for (int i = 0; i < 10000; ++i) {
        const double x = dist(rng);
        if (x >= floor) {
            return x;
        }
    }
    return floor;
}

} // namespace greenmig
