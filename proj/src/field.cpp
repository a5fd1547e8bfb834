#include "mmv/field.hpp"

#include "mmv/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mmv {

std::string to_decimal(i128 v) {
    if (v == 0) {
        return "0";
    }
    const bool negative = v < 0;
    u128 mag = negative ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    std::string out;
    while (mag != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
        mag /= 10;
    }
    if (negative) {
        out.push_back('-');
    }
    return {out.rbegin(), out.rend()};
}

namespace {

constexpr std::uint64_t kSieveBudget = std::uint64_t{1} << 28;

bool mul_saturating(u128 a, u128 b, u128& out) {
    if (a != 0 && b > std::numeric_limits<u128>::max() / a) {
        return false;
    }
    out = a * b;
    return true;
}

} // namespace

FieldCtx::FieldCtx(std::uint64_t p, Elem omega, std::uint64_t order_lb)
    : p_(p), omega_(omega), order_lb_(order_lb) {
    if (p < 2 || p >= (std::uint64_t{1} << 32)) {
        throw UsageError("field modulus must lie in [2, 2^32), got " + std::to_string(p));
    }
    if (omega >= p) {
        throw UsageError("omega must be reduced modulo p");
    }
    barrett_ = static_cast<std::uint64_t>((u128{1} << 64) / p);
}

Elem FieldCtx::pow(Elem base, std::uint64_t exp) const noexcept {
    Elem result = 1 % p_;
    while (exp != 0) {
        if (exp & 1U) {
            result = mul(result, base);
        }
        base = mul(base, base);
        exp >>= 1U;
    }
    return result;
}

Elem FieldCtx::inv(Elem x) const {
    if (x % p_ == 0) {
        throw DomainError("inverse of zero in F_" + std::to_string(p_));
    }
    // p is prime, so x^(p-2) is the inverse.
    return pow(x % p_, p_ - 2);
}

Elem FieldCtx::from_i128(i128 x) const noexcept {
    bool negative = x < 0;
    u128 mag = negative ? static_cast<u128>(-(x + 1)) + 1 : static_cast<u128>(x);
    Elem r = static_cast<Elem>(mag % p_);
    return negative ? neg(r) : r;
}

std::vector<Elem> FieldCtx::geometric(Elem ratio, std::size_t count, Elem start) const {
    std::vector<Elem> out(count);
    Elem cur = start;
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = cur;
        cur = mul(cur, ratio);
    }
    return out;
}

std::vector<std::uint64_t> sieve_primes_in_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo < 2 || lo > hi) {
        throw UsageError("sieve range requires 2 <= lo <= hi");
    }
    if (hi - lo >= kSieveBudget || hi > (std::uint64_t{1} << 62)) {
        throw ResourceError("sieve range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] exceeds the memory budget");
    }
    // Segmented sieve: small primes up to sqrt(hi), then cross off in [lo, hi].
    std::uint64_t root = 1;
    while ((root + 1) * (root + 1) <= hi) {
        ++root;
    }
    std::vector<char> small(root + 1, 1);
    std::vector<std::uint64_t> base;
    for (std::uint64_t i = 2; i <= root; ++i) {
        if (!small[i]) {
            continue;
        }
        base.push_back(i);
        for (std::uint64_t j = i * i; j <= root; j += i) {
            small[j] = 0;
        }
    }
    std::vector<char> is_prime(hi - lo + 1, 1);
    for (std::uint64_t q : base) {
        std::uint64_t start = std::max(q * q, (lo + q - 1) / q * q);
        for (std::uint64_t j = start; j <= hi; j += q) {
            is_prime[j - lo] = 0;
        }
    }
    std::vector<std::uint64_t> primes;
    for (std::uint64_t v = lo; v <= hi; ++v) {
        if (is_prime[v - lo]) {
            primes.push_back(v);
        }
    }
    return primes;
}

Elem find_generator(std::uint64_t p) {
    if (p < 3) {
        throw UsageError("find_generator requires a prime p >= 3");
    }
    FieldCtx ctx(p, 0, 1);
    // encountered[x] for x in [1, p-1]; index 0 unused.
    std::vector<bool> encountered(p, false);
    std::uint64_t remaining = p - 1;
    Elem last = 1;
    for (Elem alpha = 1; alpha < p && remaining != 0; ++alpha) {
        if (encountered[alpha]) {
            continue;
        }
        last = alpha;
        Elem x = alpha;
        do {
            if (!encountered[x]) {
                encountered[x] = true;
                --remaining;
            }
            x = ctx.mul(x, alpha);
        } while (x != alpha);
    }
    return last;
}

bool product_exceeds_twice(std::span<const FieldCtx> fields, u128 bound) {
    if (bound > std::numeric_limits<u128>::max() / 2) {
        throw UsageError("bound too large for 128-bit arithmetic");
    }
    u128 twice = bound * 2;
    u128 prod = 1;
    for (const FieldCtx& f : fields) {
        if (!mul_saturating(prod, f.modulus(), prod)) {
            return true;
        }
    }
    return prod > twice;
}

CrtBasis build_crt_basis(std::size_t n, u128 bound) {
    bound = std::max<u128>(bound, 1);
    if (n > kMaxBasisDimension) {
        throw UsageError("dimension " + std::to_string(n) + " exceeds the supported maximum 2^15");
    }
    if (bound > std::numeric_limits<u128>::max() / 2) {
        throw UsageError("bound too large for 128-bit arithmetic");
    }
    if (n < 2) {
        n = 2;
    }
    const std::uint64_t order = static_cast<std::uint64_t>(n) * n;
    const std::uint64_t threshold = order + 1;
    const u128 twice = bound * 2;

    std::size_t d = 0;
    u128 power = 1;
    while (power <= twice) {
        if (!mul_saturating(power, threshold, power)) {
            ++d;
            break;
        }
        ++d;
    }

    CrtBasis basis;
    basis.bound = bound;
    std::uint64_t lo = threshold;
    std::uint64_t window = std::max<std::uint64_t>(threshold, 1024);
    while (basis.fields.size() < d) {
        for (std::uint64_t q : sieve_primes_in_range(lo, lo + window - 1)) {
            if (basis.fields.size() == d) {
                break;
            }
            basis.fields.emplace_back(q, find_generator(q), order);
        }
        lo += window;
    }
    if (!product_exceeds_twice(basis.fields, bound)) {
        throw InternalError("CRT basis product does not exceed twice the bound");
    }
    return basis;
}

} // namespace mmv
