#pragma once

// Counter-based splittable pseudo-random stream (SplitMix64 finalizer over
// seed + counter). Streams are reproducible from (seed, stream id) alone and
// do not depend on the standard library's distribution implementations.

#include <cstdint>

namespace mmv {

class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : seed_(seed), key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() noexcept { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    /// Uniform in [0, bound), bound >= 1 (multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
        const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        return span == 0 ? static_cast<std::int64_t>(next())
                         : static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span));
    }

    /// Independent child stream.
    SplitRng split(std::uint64_t stream) const noexcept { return SplitRng(key_, stream); }

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace mmv
