#pragma once

#include <cstdint>

namespace qbroker {

// Named sub-streams derived from one master seed. Keeping the ids stable
// keeps every command reproducible from a single --seed.
enum class RngStream : std::uint64_t {
    curve_synthesis = 1,
    trace_generation = 2,
    instance_sampling = 3,
    triple_sampling = 4,
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// xoshiro256**. Self-contained so that streams are bit-reproducible across
/// standard libraries and platforms (std::uniform_*_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0) {
        std::uint64_t x = seed;
        x = detail::splitmix64(x ^ (0xa0761d6478bd642fULL * (stream + 1)));
        x = detail::splitmix64(x ^ (0xe7037ed1a0b428dbULL * (index + 1)));
        for (auto& word : state_) {
            x = detail::splitmix64(x);
            word = x;
        }
    }
    Rng(std::uint64_t seed, RngStream stream, std::uint64_t index = 0)
        : Rng(seed, static_cast<std::uint64_t>(stream), index) {}

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    long long uniform_int(long long lo, long long hi) {
        const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long long>(mul_shift(next(), range));
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static std::uint64_t mul_shift(std::uint64_t x, std::uint64_t range) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(range)) >> 64);
    }

    std::uint64_t state_[4];
};

} // namespace qbroker
