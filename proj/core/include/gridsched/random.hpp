#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gridsched {

/// The random stream threaded through every sampling routine.
using Rng = std::mt19937_64;

/// Child seed for a numbered component (scenario index, month, record...).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t component) noexcept;

/// Child seed for a named component ("ce-sampling", "scenario", ...).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

inline double standard_normal(Rng& rng) {
    std::normal_distribution<double> n{0.0, 1.0};
    return n(rng);
}

inline double uniform01(Rng& rng) {
    std::uniform_real_distribution<double> u{0.0, 1.0};
    return u(rng);
}

/// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
    std::uniform_int_distribution<int> u{lo, hi};
    return u(rng);
}

}  // namespace gridsched
