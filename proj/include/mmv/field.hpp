#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mmv {

using u128 = unsigned __int128;
using i128 = __int128;

/// Field elements are stored reduced in [0, p).
using Elem = std::uint64_t;

/// Decimal rendering of a 128-bit integer.
std::string to_decimal(i128 v);

/// Arithmetic context for F_p with a distinguished element omega whose
/// multiplicative order is at least order_lb. The modulus is below 2^32 so a
/// product of two reduced elements fits in 64 bits.
class FieldCtx {
public:
    FieldCtx(std::uint64_t p, Elem omega, std::uint64_t order_lb);

    std::uint64_t modulus() const noexcept { return p_; }
    Elem omega() const noexcept { return omega_; }
    std::uint64_t order_lb() const noexcept { return order_lb_; }

    Elem add(Elem x, Elem y) const noexcept {
        Elem s = x + y;
        return s >= p_ ? s - p_ : s;
    }
    Elem sub(Elem x, Elem y) const noexcept { return x >= y ? x - y : x + p_ - y; }
    Elem neg(Elem x) const noexcept { return x == 0 ? 0 : p_ - x; }
    Elem mul(Elem x, Elem y) const noexcept { return reduce(x * y); }
    Elem pow(Elem base, std::uint64_t exp) const noexcept;
    /// Throws DomainError for x = 0.
    Elem inv(Elem x) const;

    /// Barrett reduction of any 64-bit value.
    Elem reduce(std::uint64_t x) const noexcept {
        std::uint64_t q = static_cast<std::uint64_t>((static_cast<u128>(x) * barrett_) >> 64);
        std::uint64_t r = x - q * p_;
        return r >= p_ ? r - p_ : r;
    }
    /// Euclidean remainder of a signed integer.
    Elem from_int(std::int64_t x) const noexcept {
        if (x >= 0) {
            return reduce(static_cast<std::uint64_t>(x));
        }
        return neg(reduce(~static_cast<std::uint64_t>(x) + 1));
    }
    Elem from_i128(i128 x) const noexcept;

    /// start, start*ratio, ..., start*ratio^(count-1).
    std::vector<Elem> geometric(Elem ratio, std::size_t count, Elem start = 1) const;
    /// omega^0 .. omega^(count-1).
    std::vector<Elem> omega_powers(std::size_t count) const { return geometric(omega_, count); }

    friend bool operator==(const FieldCtx& a, const FieldCtx& b) noexcept {
        return a.p_ == b.p_ && a.omega_ == b.omega_;
    }

private:
    std::uint64_t p_;
    Elem omega_;
    std::uint64_t order_lb_;
    std::uint64_t barrett_;
};

/// Free-function spelling of the field operations.
inline Elem mod_add(Elem x, Elem y, const FieldCtx& ctx) { return ctx.add(x, y); }
inline Elem mod_sub(Elem x, Elem y, const FieldCtx& ctx) { return ctx.sub(x, y); }
inline Elem mod_mul(Elem x, Elem y, const FieldCtx& ctx) { return ctx.mul(x, y); }
inline Elem mod_pow(Elem x, std::uint64_t e, const FieldCtx& ctx) { return ctx.pow(x, e); }
inline Elem mod_inv(Elem x, const FieldCtx& ctx) { return ctx.inv(x); }

/// Ascending primes in [lo, hi]. Throws ResourceError when the range would
/// exceed the sieve memory budget.
std::vector<std::uint64_t> sieve_primes_in_range(std::uint64_t lo, std::uint64_t hi);

/// Generator of F_p^x found by subgroup elimination: candidates are taken in
/// ascending order from the set of elements not yet covered by a generated
/// subgroup, and the last candidate taken generates the whole group.
Elem find_generator(std::uint64_t p);

/// Distinct primes p_i >= n^2 + 1, each with a generator, whose product
/// exceeds 2 * bound.
struct CrtBasis {
    std::vector<FieldCtx> fields;
    u128 bound = 0;

    std::size_t size() const noexcept { return fields.size(); }
};

/// Largest dimension accepted when sizing primes.
inline constexpr std::size_t kMaxBasisDimension = std::size_t{1} << 15;

/// d = smallest count with (n^2+1)^d > 2*bound; the primes are the d smallest
/// primes >= n^2+1. n < 2 is treated as 2, bound 0 as 1.
CrtBasis build_crt_basis(std::size_t n, u128 bound);

/// Exact test of prod(moduli) > 2*bound using saturating 128-bit arithmetic.
bool product_exceeds_twice(std::span<const FieldCtx> fields, u128 bound);

} // namespace mmv
