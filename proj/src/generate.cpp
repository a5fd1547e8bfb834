#include "mmv/generate.hpp"

#include "mmv/errors.hpp"
#include "mmv/random.hpp"

#include <unordered_set>

namespace mmv {

std::vector<std::uint64_t> sample_distinct(std::uint64_t m, std::size_t z, std::uint64_t seed) {
    if (z > m) {
        throw UsageError("cannot pick " + std::to_string(z) + " distinct values below " + std::to_string(m));
    }
    SplitRng rng(seed, 2);
    std::vector<std::uint64_t> out;
    out.reserve(z);
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t j = m - z; j < m; ++j) {
        const std::uint64_t v = rng.below(j + 1);
        const std::uint64_t pick = seen.contains(v) ? j : v;
        seen.insert(pick);
        out.push_back(pick);
    }
    return out;
}

GeneratedInstance generate_instance(std::size_t n, std::size_t z, std::uint64_t seed, const GenerateOptions& opts) {
    if (n == 0) {
        throw UsageError("n must be at least 1");
    }
    if (z > n * n) {
        throw UsageError("z=" + std::to_string(z) + " exceeds n^2=" + std::to_string(n * n));
    }
    if (opts.lo > opts.hi) {
        throw UsageError("empty entry range");
    }
    SplitRng entries(seed, 0);
    DenseIntMatrix a(n, n), b(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a.set(i, j, entries.between(opts.lo, opts.hi));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            b.set(i, j, entries.between(opts.lo, opts.hi));
        }
    }
    if (opts.b_columns != 0 && opts.b_columns < n) {
        const auto keep = sample_distinct(n, opts.b_columns, seed ^ 0x5eedULL);
        std::vector<bool> kept(n, false);
        for (const auto col : keep) {
            kept[col] = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (!kept[j]) {
                    b.set(i, j, 0);
                }
            }
        }
    }
    DenseIntMatrix product = naive_multiply(a, b);
    DenseIntMatrix c = product;
    SplitRng deltas(seed, 1);
    std::vector<std::pair<std::size_t, std::size_t>> planted;
    for (const std::uint64_t pos : sample_distinct(static_cast<std::uint64_t>(n) * n, z, seed)) {
        const std::size_t i = pos / n;
        const std::size_t j = pos % n;
        std::int64_t d = deltas.between(-9, 8);
        d += d >= 0 ? 1 : 0;  // [-9, 9] without 0
        c.set(i, j, c.at(i, j) + d);
        planted.emplace_back(i, j);
    }
    return {std::move(a), std::move(b), std::move(c), std::move(product), std::move(planted)};
}

} // namespace mmv
