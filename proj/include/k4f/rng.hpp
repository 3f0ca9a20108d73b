#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace k4f {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds a tuple of words into a stream key. Distinct tuples give distinct
// keys up to 64-bit hash collisions.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto p : parts)
        h = mix64(h ^ mix64(p + 0x9e3779b97f4a7c15ULL));
    return h;
}

// Stage tags for the pure per-edge random draws.
enum class DrawTag : std::uint64_t {
    greedy_permutation = 1,
    big_bite_outer = 2,
    big_bite_inner = 3,
    bite = 4,
    bite_oneshot = 5,
    birthtime = 6,
    sample = 7,
    tree = 8,
    subset = 9,
    heuristic = 10,
    partition = 11,
};

// Maps the top 53 bits of a word to [0,1).
constexpr double to_unit(std::uint64_t w) noexcept
{
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// The counter-th word of the stream `key`; equals the (counter+1)-th output
// of CounterRng(key).
constexpr std::uint64_t draw_at(std::uint64_t key, std::uint64_t counter) noexcept
{
    return mix64(key + (counter + 1) * 0x9e3779b97f4a7c15ULL);
}

// Uniform in [0,1) as a pure function of (key, counter).
constexpr double unit_at(std::uint64_t key, std::uint64_t counter) noexcept
{
    return to_unit(draw_at(key, counter));
}

// Counter-based generator: the i-th output is mix64(key + i * golden).
// Satisfies UniformRandomBitGenerator; bounded draws avoid the
// implementation-defined std distributions so streams are portable.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter)
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    constexpr double uniform() noexcept { return to_unit((*this)()); }

    // Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        if (bound <= 1)
            return 0;
        unsigned __int128 prod = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(prod);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                prod = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(prod);
            }
        }
        return static_cast<std::uint64_t>(prod >> 64);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace k4f
