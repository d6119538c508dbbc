#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace etfs {

// Mersenne twister output is fixed by the standard, so seeded streams are
// reproducible across platforms. Distributions come from Boost.Random for
// the same reason (std:: distributions are implementation-defined).
using Rng = std::mt19937_64;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x);

// Stable 64-bit hash of a label (FNV-1a), used to name experiment streams.
std::uint64_t label_hash(std::string_view label);

// Seed for an independent stream identified by (master, a, b, c).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

double standard_normal(Rng& rng);
// Circularly symmetric, E|z|^2 = 1.
std::complex<double> standard_complex_normal(Rng& rng);
double uniform01(Rng& rng);
// Uniform integer in [lo, hi].
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

}  // namespace etfs
