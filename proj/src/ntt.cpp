#include "ntt.hpp"

#include "mmv/errors.hpp"

#include <array>
#include <algorithm>
#include <bit>

namespace mmv::detail {

namespace {

// Montgomery arithmetic modulo an odd prime below 2^30 with R = 2^32.
class Montgomery {
public:
    constexpr Montgomery(std::uint32_t mod, std::uint32_t generator) : mod_(mod), generator_(generator) {
        std::uint32_t inv = mod;
        for (int i = 0; i < 5; ++i) {
            inv *= 2U - mod * inv;
        }
        nprime_ = ~inv + 1U;
        std::uint64_t r = (std::uint64_t{1} << 32) % mod;
        r2_ = static_cast<std::uint32_t>(r * r % mod);
    }

    std::uint32_t mod() const noexcept { return mod_; }
    std::uint32_t generator() const noexcept { return generator_; }

    // x * R^-1 in [0, 2 mod) for x < mod * 2^32.
    std::uint32_t reduce_lazy(std::uint64_t x) const noexcept {
        std::uint32_t m = static_cast<std::uint32_t>(x) * nprime_;
        return static_cast<std::uint32_t>((x + static_cast<std::uint64_t>(m) * mod_) >> 32);
    }
    std::uint32_t reduce(std::uint64_t x) const noexcept {
        std::uint32_t t = reduce_lazy(x);
        return t >= mod_ ? t - mod_ : t;
    }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
        return reduce(static_cast<std::uint64_t>(a) * b);
    }
    std::uint32_t to_mont(std::uint64_t a) const noexcept {
        return reduce(static_cast<std::uint64_t>(static_cast<std::uint32_t>(a % mod_)) * r2_);
    }

    // Plain (non-Montgomery) exponentiation, used only for setup.
    std::uint32_t pow_plain(std::uint64_t base, std::uint64_t exp) const noexcept {
        std::uint64_t r = 1;
        base %= mod_;
        while (exp) {
            if (exp & 1U) {
                r = r * base % mod_;
            }
            base = base * base % mod_;
            exp >>= 1U;
        }
        return static_cast<std::uint32_t>(r);
    }

private:
    std::uint32_t mod_;
    std::uint32_t generator_;
    std::uint32_t nprime_ = 0;
    std::uint32_t r2_ = 0;
};

constexpr std::array<Montgomery, 3> kPrimes{
    Montgomery{998244353U, 3U},
    Montgomery{167772161U, 3U},
    Montgomery{469762049U, 3U},
};
constexpr std::uint32_t kSmallestPrime = 167772161U;

// Twiddle tables in Montgomery form, laid out so that table[len + j] is
// w_{2 len}^j. The layout does not depend on the transform size, so one
// growing table per prime serves every length.
struct Twiddles {
    std::vector<std::uint32_t> forward;
    std::vector<std::uint32_t> inverse;
};

const Twiddles& twiddles_for(std::size_t prime_index, std::size_t n) {
    thread_local std::array<Twiddles, 3> cache;
    Twiddles& tw = cache[prime_index];
    const Montgomery& F = kPrimes[prime_index];
    const std::size_t have = tw.forward.size();
    if (have >= n) {
        return tw;
    }
    tw.forward.resize(n);
    tw.inverse.resize(n);
    for (std::size_t len = std::max<std::size_t>(have, 1); len < n; len <<= 1U) {
        std::uint64_t order = 2 * len;
        std::uint32_t w = F.pow_plain(F.generator(), (F.mod() - 1) / order);
        std::uint32_t wi = F.pow_plain(w, F.mod() - 2);
        std::uint32_t wm = F.to_mont(w);
        std::uint32_t wim = F.to_mont(wi);
        std::uint32_t cur = F.to_mont(1);
        std::uint32_t curi = cur;
        for (std::size_t j = 0; j < len; ++j) {
            tw.forward[len + j] = cur;
            tw.inverse[len + j] = curi;
            cur = F.mul(cur, wm);
            curi = F.mul(curi, wim);
        }
    }
    return tw;
}

// Both transforms keep values lazily in [0, 2 mod); the twiddles are in
// Montgomery form, so plain inputs give plain outputs.

// Decimation in frequency: natural order in, bit-reversed order out.
void forward(std::uint32_t* a, std::size_t n, const Montgomery& F, const std::uint32_t* tw) {
    const std::uint32_t m2 = 2 * F.mod();
    for (std::size_t len = n / 2; len >= 1; len >>= 1U) {
        const std::uint32_t* w = tw + len;
        for (std::size_t i = 0; i < n; i += 2 * len) {
            std::uint32_t* lo = a + i;
            std::uint32_t* hi = lo + len;
            for (std::size_t j = 0; j < len; ++j) {
                const std::uint32_t u = lo[j];
                const std::uint32_t v = hi[j];
                const std::uint32_t s = u + v;
                lo[j] = s >= m2 ? s - m2 : s;
                hi[j] = F.reduce_lazy(static_cast<std::uint64_t>(u + m2 - v) * w[j]);
            }
        }
    }
}

// Decimation in time: bit-reversed order in, natural order out (unscaled).
void inverse(std::uint32_t* a, std::size_t n, const Montgomery& F, const std::uint32_t* tw) {
    const std::uint32_t m2 = 2 * F.mod();
    for (std::size_t len = 1; len < n; len <<= 1U) {
        const std::uint32_t* w = tw + len;
        for (std::size_t i = 0; i < n; i += 2 * len) {
            std::uint32_t* lo = a + i;
            std::uint32_t* hi = lo + len;
            for (std::size_t j = 0; j < len; ++j) {
                const std::uint32_t u = lo[j];
                const std::uint32_t v = F.reduce_lazy(static_cast<std::uint64_t>(hi[j]) * w[j]);
                const std::uint32_t s = u + v;
                const std::uint32_t d = u + m2 - v;
                lo[j] = s >= m2 ? s - m2 : s;
                hi[j] = d >= m2 ? d - m2 : d;
            }
        }
    }
}

void load(std::uint32_t* dst, std::span<const Elem> src, std::size_t size, const Montgomery& F, bool needs_mod) {
    if (needs_mod) {
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst[i] = static_cast<std::uint32_t>(src[i] % F.mod());
        }
    } else {
        for (std::size_t i = 0; i < src.size(); ++i) {
            dst[i] = static_cast<std::uint32_t>(src[i]);
        }
    }
    std::fill(dst + src.size(), dst + size, 0U);
}

// Multiplier taking a plain x to the Montgomery form of x / size.
std::uint32_t scale_factor(const Montgomery& F, std::size_t size) {
    return F.to_mont(F.to_mont(F.pow_plain(size, F.mod() - 2)));
}

void normalize(std::uint32_t* a, std::size_t n, const Montgomery& F) {
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = a[i] >= F.mod() ? a[i] - F.mod() : a[i];
    }
}

// Convolution modulo one NTT prime; result in plain form.
void convolve_one(std::span<const Elem> a, std::span<const Elem> b, std::size_t prime_index, std::size_t size,
                  bool needs_mod, std::uint32_t* out) {
    const Montgomery& F = kPrimes[prime_index];
    const Twiddles& tw = twiddles_for(prime_index, size);
    std::vector<std::uint32_t> fb(size);
    load(out, a, size, F, needs_mod);
    load(fb.data(), b, size, F, needs_mod);
    forward(out, size, F, tw.forward.data());
    forward(fb.data(), size, F, tw.forward.data());
    const std::uint32_t scale = scale_factor(F, size);
    for (std::size_t i = 0; i < size; ++i) {
        fb[i] = F.mul(fb[i], scale);
        out[i] = F.reduce_lazy(static_cast<std::uint64_t>(out[i]) * fb[i]);
    }
    inverse(out, size, F, tw.inverse.data());
    normalize(out, size, F);
}

// Garner recombination of residues modulo the NTT primes, reduced mod p.
// The modular inverses are held in Montgomery form to avoid divisions.
struct Garner {
    explicit Garner(const FieldCtx& ctx) : ctx(ctx) {
        const std::uint64_t m0 = kPrimes[0].mod();
        const std::uint64_t m1 = kPrimes[1].mod();
        const std::uint64_t m2 = kPrimes[2].mod();
        const Montgomery& F1 = kPrimes[1];
        const Montgomery& F2 = kPrimes[2];
        inv_m0_mod_m1 = F1.to_mont(F1.pow_plain(m0, m1 - 2));
        const std::uint32_t m01 = static_cast<std::uint32_t>(m0 % m2 * (m1 % m2) % m2);
        inv_m01_mod_m2 = F2.to_mont(F2.to_mont(F2.pow_plain(m01, m2 - 2)));
        m01_p = ctx.reduce(static_cast<std::uint64_t>(static_cast<u128>(m0) * m1 % ctx.modulus()));
    }

    Elem combine(std::size_t primes, std::uint32_t r0, std::uint32_t r1, std::uint32_t r2) const noexcept {
        if (primes == 1) {
            return ctx.reduce(r0);
        }
        const Montgomery& F1 = kPrimes[1];
        const std::uint64_t m0 = kPrimes[0].mod();
        // r0 < m0 < 6 m1, so the difference stays positive and below 2^32.
        const std::uint32_t d1 = r1 + 6U * F1.mod() - r0;
        const std::uint32_t y1 = F1.mul(d1, inv_m0_mod_m1);
        const std::uint64_t v = r0 + y1 * m0;
        if (primes == 2) {
            return ctx.reduce(v);
        }
        const Montgomery& F2 = kPrimes[2];
        // Both reductions carry the same R^-1 factor, removed by the R^2 in the inverse.
        const std::uint32_t a = F2.reduce(r2);
        const std::uint32_t b = F2.reduce(v);
        const std::uint32_t d2 = a >= b ? a - b : a + F2.mod() - b;
        const std::uint32_t y2 = F2.mul(d2, inv_m01_mod_m2);
        return ctx.add(ctx.reduce(v), ctx.mul(ctx.reduce(y2), m01_p));
    }

    const FieldCtx& ctx;
    std::uint32_t inv_m0_mod_m1 = 0;
    std::uint32_t inv_m01_mod_m2 = 0;
    Elem m01_p = 0;
};

} // namespace

std::size_t ntt_primes_needed(std::size_t min_len, std::uint64_t p) {
    u128 bound = static_cast<u128>(min_len) * (p - 1) * (p - 1);
    u128 prod = 1;
    for (std::size_t k = 0; k < kPrimes.size(); ++k) {
        prod *= kPrimes[k].mod();
        if (prod > bound) {
            return k + 1;
        }
    }
    throw ResourceError("convolution coefficients exceed the NTT prime product");
}

std::vector<Elem> ntt_convolve(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx) {
    if (a.empty() || b.empty()) {
        return {};
    }
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t size = std::bit_ceil(out_len);
    if (size > kMaxNttLength) {
        throw ResourceError("convolution length exceeds the NTT limit");
    }
    const std::uint64_t p = ctx.modulus();
    const std::size_t primes = ntt_primes_needed(std::min(a.size(), b.size()), p);

    const bool needs_mod = p > kSmallestPrime;
    std::vector<std::uint32_t> res(primes * size);
    for (std::size_t k = 0; k < primes; ++k) {
        convolve_one(a, b, k, size, needs_mod, res.data() + k * size);
    }

    std::vector<Elem> out(out_len);
    Garner garner(ctx);
    for (std::size_t i = 0; i < out_len; ++i) {
        out[i] = garner.combine(primes, res[i], primes > 1 ? res[size + i] : 0, primes > 2 ? res[2 * size + i] : 0);
    }
    return out;
}

FixedKernelConvolver::FixedKernelConvolver(std::span<const Elem> kernel, std::size_t input_len,
                                           const FieldCtx& ctx)
    : ctx_(ctx), size_(std::bit_ceil(std::max<std::size_t>(kernel.size(), 1))), input_len_(input_len) {
    if (size_ > kMaxNttLength) {
        throw ResourceError("kernel length exceeds the NTT limit");
    }
    if (input_len > size_) {
        throw UsageError("input length exceeds the cyclic transform size");
    }
    primes_ = ntt_primes_needed(std::max<std::size_t>(std::min(input_len, kernel.size()), 1), ctx.modulus());
    needs_mod_ = ctx.modulus() > kSmallestPrime;
    kernel_hat_.resize(primes_);
    for (std::size_t k = 0; k < primes_; ++k) {
        const Montgomery& F = kPrimes[k];
        const Twiddles& tw = twiddles_for(k, size_);
        std::vector<std::uint32_t>& hat = kernel_hat_[k];
        hat.resize(size_);
        load(hat.data(), kernel, size_, F, needs_mod_);
        forward(hat.data(), size_, F, tw.forward.data());
        // Stored in Montgomery form with the 1/size scaling folded in, so a
        // plain input times the kernel comes out plain.
        const std::uint32_t scale = scale_factor(F, size_);
        for (std::uint32_t& x : hat) {
            x = F.mul(x, scale);
        }
    }
}

void FixedKernelConvolver::convolve_range(std::span<const Elem> input, std::size_t first,
                                          std::span<Elem> out) const {
    if (input.size() > input_len_) {
        throw UsageError("input longer than the convolver was sized for");
    }
    if (first + out.size() > size_) {
        throw UsageError("requested range exceeds the cyclic transform size");
    }
    thread_local std::vector<std::uint32_t> scratch;
    scratch.resize(primes_ * size_);
    for (std::size_t k = 0; k < primes_; ++k) {
        const Montgomery& F = kPrimes[k];
        const Twiddles& tw = twiddles_for(k, size_);
        std::uint32_t* a = scratch.data() + k * size_;
        load(a, input, size_, F, needs_mod_);
        forward(a, size_, F, tw.forward.data());
        const std::uint32_t* hat = kernel_hat_[k].data();
        for (std::size_t i = 0; i < size_; ++i) {
            a[i] = F.reduce_lazy(static_cast<std::uint64_t>(a[i]) * hat[i]);
        }
        inverse(a, size_, F, tw.inverse.data());
        normalize(a, size_, F);
    }
    Garner garner(ctx_);
    const std::uint32_t* r0 = scratch.data();
    const std::uint32_t* r1 = primes_ > 1 ? r0 + size_ : nullptr;
    const std::uint32_t* r2 = primes_ > 2 ? r0 + 2 * size_ : nullptr;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t idx = first + i;
        out[i] = garner.combine(primes_, r0[idx], r1 ? r1[idx] : 0, r2 ? r2[idx] : 0);
    }
}

} // namespace mmv::detail
