#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace symq {

/// All stochastic code draws from this engine.
using Rng = std::mt19937_64;

/// Recorded in experiment metadata so outputs can be matched to a generator.
inline constexpr std::string_view kRngIdentity =
    "std::mt19937_64; stream seed = splitmix64(master ^ splitmix64(stream + 0x9e3779b97f4a7c15))";

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of independent stream `stream` under master seed `master`.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

/// Engine for (master, stream); the stream-split rule used everywhere.
Rng make_stream(std::uint64_t master, std::uint64_t stream);

/// Uniform on [0, 1).
double uniform01(Rng& rng);

/// Normal(mean, sigma) conditioned on a strictly positive draw by
/// resampling. sigma == 0 returns mean. Requires mean > 0, sigma >= 0.
double positive_normal(Rng& rng, double mean, double sigma);

}  // namespace symq
