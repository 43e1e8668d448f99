#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace netmirror {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for an independent stream identified by a master seed and a key path,
// e.g. derive_seed(seed, {replicate, time}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);
Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

// The draws below avoid std distributions so streams are identical across
// standard library implementations.
double uniform01(Rng& rng);
std::size_t uniform_index(Rng& rng, std::size_t n);
double standard_normal(Rng& rng);

}  // namespace netmirror
