// timefork — timestamp-forking attack simulator and analyzer
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>

namespace timefork {

// Deterministic 64-bit generator (splitmix64).  The standard-library
// distributions are implementation-defined, which would break bit-for-bit
// reproducibility across toolchains; every random draw in this project goes
// through this class and the explicit transforms below.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1): 53 random bits, never returns 1.0.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Exponential with the given mean via inversion; uniform01() < 1 keeps
    // the log argument strictly positive.
    double exponential(double mean) {
        return -mean * std::log1p(-uniform01());
    }

    bool bernoulli(double p) { return uniform01() < p; }

    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  private:
    std::uint64_t state_;
};

// Stateless seed derivation: every trial gets its own independent stream, so
// trials can run in any order or in parallel and still reproduce exactly.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng mixer(seed ^ (0xD1B54A32D192ED03ull * (stream + 1)));
    mixer.next_u64();
    return mixer.next_u64();
}

}  // namespace timefork
