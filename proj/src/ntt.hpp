#pragma once

// Exact integer convolution through three NTT-friendly primes, reduced to an
// arbitrary word-sized modulus by Garner recombination.

#include "mmv/field.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mmv::detail {

/// Longest transform supported by every NTT prime.
inline constexpr std::size_t kMaxNttLength = std::size_t{1} << 23;

/// Number of NTT primes needed so that their product exceeds every
/// coefficient of an exact convolution of length-min_len inputs over F_p.
std::size_t ntt_primes_needed(std::size_t min_len, std::uint64_t p);

/// a * b over F_p (ctx.modulus()), computed via NTT. Requires
/// a.size() + b.size() - 1 <= kMaxNttLength.
std::vector<Elem> ntt_convolve(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx);

/// Cyclic convolution against a fixed kernel whose transforms are computed
/// once. Inputs may hold up to input_len coefficients; the transform length
/// is bit_ceil(kernel.size()).
class FixedKernelConvolver {
public:
    FixedKernelConvolver(std::span<const Elem> kernel, std::size_t input_len, const FieldCtx& ctx);

    std::size_t transform_size() const noexcept { return size_; }

    /// Entries [first, first + out.size()) of the cyclic convolution of
    /// input with the kernel, reduced modulo p.
    void convolve_range(std::span<const Elem> input, std::size_t first, std::span<Elem> out) const;

private:
    FieldCtx ctx_;
    std::size_t size_ = 0;
    std::size_t input_len_ = 0;
    std::size_t primes_ = 0;
    bool needs_mod_ = false;
    std::vector<std::vector<std::uint32_t>> kernel_hat_;
};

} // namespace mmv::detail
