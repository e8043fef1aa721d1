#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace causalfm {

struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(Seed, Seed) = default;
};

/// One step of SplitMix64; used for seeding and for seed derivation.
std::uint64_t splitmix64(std::uint64_t &state) noexcept;

/// Deterministic generator shared by every simulation in the toolkit.
///
/// The algorithm is fixed: xoshiro256** whose 256-bit state is filled by
/// SplitMix64 from (seed, stream). Doubles take the top 53 bits of a draw,
/// normals come from the Box-Muller transform (pairs cached). Changing any of
/// this changes every generated dataset, so don't.
class Rng {
public:
    explicit Rng(Seed seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1).
    double uniform01() noexcept;
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept;
    double normal() noexcept;
    bool bernoulli(double p) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// n i.i.d. draws from U(lo, hi) on stream 0 of seed. Throws when lo >= hi.
std::vector<double> rng_uniform(Seed seed, double lo, double hi, std::size_t n);

/// FNV-1a, used to turn experiment tags into seed material.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Child seed for a named task: splitmix64(master ^ fnv1a64(tag)).
/// Trials derive their seed from (experiment id, grid value, trial index)
/// encoded in tag, so any trial can be rerun in isolation.
Seed derive_seed(Seed master, std::string_view tag) noexcept;

}  // namespace causalfm
