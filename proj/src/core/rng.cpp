#include "causalfm/core/rng.hpp"

#include <cmath>
#include <numbers>

#include "causalfm/core/error.hpp"

namespace causalfm {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t &state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(Seed seed, std::uint64_t stream) noexcept {
    std::uint64_t sm = seed.value;
    // Streams are separated by hashing the stream index into the seeding state.
    std::uint64_t st = stream;
    sm ^= splitmix64(st);
    for (auto &word : s_) {
        word = splitmix64(sm);
    }
}

std::uint64_t Rng::next_u64() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01();
}

double Rng::normal() noexcept {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

bool Rng::bernoulli(double p) noexcept {
    return uniform01() < p;
}

std::vector<double> rng_uniform(Seed seed, double lo, double hi, std::size_t n) {
    if (!(lo < hi)) {
        throw InvalidArgument("rng_uniform requires lo < hi");
    }
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto &v : out) {
        v = rng.uniform(lo, hi);
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

Seed derive_seed(Seed master, std::string_view tag) noexcept {
    std::uint64_t state = master.value ^ fnv1a64(tag);
    return Seed{splitmix64(state)};
}

}  // namespace causalfm
