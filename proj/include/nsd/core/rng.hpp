#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace nsd {

/// xoshiro256** seeded through splitmix64.
///
/// Every derived quantity (uniforms, normals, bounded integers, shuffles) is
/// computed here rather than through <random> distributions, whose outputs
/// differ between standard library implementations. Streams are therefore
/// identical on every platform and easy to reproduce in other languages:
///
///   state[i]   = splitmix64 outputs 0..3 starting from `seed`
///   next_u64   = xoshiro256** step
///   uniform    = (next_u64 >> 11) * 2^-53                       in [0, 1)
///   normal     = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)             Box-Muller
///   below(n)   = rejection sampling on the top bits, unbiased
///   shuffle    = Fisher-Yates from the back, j = below(i + 1)
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double next_uniform();
    double next_normal();
    std::uint64_t next_below(std::uint64_t bound);

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// Seed for an independent sub-stream, e.g. one per purpose in a run.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

private:
    std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace nsd
