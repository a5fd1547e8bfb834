#include "oracles.hpp"

#include "mmv/errors.hpp"
#include "mmv/poly.hpp"

#include <doctest.h>

using namespace mmv;

namespace {

std::vector<Elem> random_coeffs(SplitRng& rng, std::size_t len, std::uint64_t p) {
    std::vector<Elem> c(len);
    for (auto& x : c) {
        x = rng.below(p);
    }
    return c;
}

std::vector<std::uint64_t> as_u64(std::span<const Elem> c) { return {c.begin(), c.end()}; }

// Primes of different shapes: tiny, NTT-friendly, generic, near 2^32.
const std::uint64_t kPrimes[] = {17, 65537, 262147, 998244353, 4294967291ULL};

} // namespace

TEST_SUITE("poly_eval") {

TEST_CASE("poly_mul examples") {
    const FieldCtx f17(17, 3, 16);
    const Poly a(f17, {1, 1}), b(f17, {1, 16});
    CHECK(poly_mul(a, b) == Poly(f17, {1, 0, 16}));
    CHECK(poly_mul(a, Poly(f17)).is_zero());
    const FieldCtx f5(5, 2, 4);
    CHECK(poly_mul(Poly(f5, {1, 1, 1}), Poly(f5, {1, 1})) == Poly(f5, {1, 2, 2, 1}));
}

TEST_CASE("poly_mul agrees with schoolbook convolution") {
    SplitRng rng(7);
    for (const std::uint64_t p : kPrimes) {
        const FieldCtx f(p, 1 % p, 1);
        for (std::size_t la : {1, 2, 31, 32, 33, 100, 128, 129, 257}) {
            const std::size_t lb = 1 + rng.below(257);
            auto ca = random_coeffs(rng, la, p);
            auto cb = random_coeffs(rng, lb, p);
            ca.back() = ca.back() ? ca.back() : 1;
            cb.back() = cb.back() ? cb.back() : 1;
            const Poly prod = poly_mul(Poly(f, ca), Poly(f, cb));
            CHECK(as_u64(prod.coeffs()) == oracle::convolve(as_u64(ca), as_u64(cb), p));
        }
    }
}

TEST_CASE("mismatched contexts are rejected") {
    const FieldCtx f17(17, 3, 16), f5(5, 2, 4);
    CHECK_THROWS_AS(poly_mul(Poly(f17, {1}), Poly(f5, {1})), UsageError);
}

TEST_CASE("poly_divrem examples and reconstruction") {
    const FieldCtx f17(17, 3, 16);
    const DivRem d = poly_divrem(Poly(f17, {0, 0, 1}), Poly(f17, {16, 1}));
    CHECK(d.quotient == Poly(f17, {1, 1}));
    CHECK(d.remainder == Poly(f17, {1}));
    const Poly f(f17, {3, 1, 4, 1, 5});
    const DivRem self = poly_divrem(f, f);
    CHECK(self.quotient == Poly(f17, {1}));
    CHECK(self.remainder.is_zero());
    const FieldCtx f5(5, 2, 4);
    const DivRem e = poly_divrem(Poly(f5, {1, 2, 0, 1}), Poly(f5, {1, 0, 1}));
    CHECK(e.quotient == Poly(f5, {0, 1}));
    CHECK(e.remainder == Poly(f5, {1, 1}));
    CHECK_THROWS_AS(poly_divrem(f, Poly(f17)), DomainError);

    SplitRng rng(11);
    for (const std::uint64_t p : kPrimes) {
        const FieldCtx ctx(p, 1 % p, 1);
        for (int it = 0; it < 20; ++it) {
            auto cf = random_coeffs(rng, 1 + rng.below(600), p);
            auto cg = random_coeffs(rng, 1 + rng.below(300), p);
            cg.back() = cg.back() ? cg.back() : 1;
            const Poly pf(ctx, cf), pg(ctx, cg);
            const DivRem qr = poly_divrem(pf, pg);
            CHECK(qr.remainder.degree() < pg.degree());
            const auto back = oracle::convolve(as_u64(qr.quotient.coeffs()), as_u64(pg.coeffs()), p);
            std::vector<std::uint64_t> sum(std::max(back.size(), qr.remainder.coeffs().size()), 0);
            for (std::size_t i = 0; i < back.size(); ++i) {
                sum[i] = back[i];
            }
            for (std::size_t i = 0; i < qr.remainder.coeffs().size(); ++i) {
                sum[i] = (sum[i] + qr.remainder.coeffs()[i]) % p;
            }
            while (!sum.empty() && sum.back() == 0) {
                sum.pop_back();
            }
            CHECK(sum == as_u64(pf.coeffs()));
        }
    }
}

TEST_CASE("horner_eval examples") {
    const FieldCtx f17(17, 3, 16);
    CHECK(horner_eval(Poly(f17, {3}), 9) == 3);
    CHECK(horner_eval(Poly(f17, {1, 0, 0, 1}), 2) == 9);
    CHECK(horner_eval(Poly(f17, {0, 16, 1}), 1) == 0);
}

TEST_CASE("multipoint_eval examples") {
    const FieldCtx f17(17, 3, 16);
    const std::vector<Elem> pts{1, 2};
    CHECK(multipoint_eval(Poly(f17, {1, 0, 0, 1}), pts) == std::vector<Elem>{2, 9});
    CHECK(multipoint_eval(Poly(f17), pts) == std::vector<Elem>{0, 0});
    const FieldCtx f7(7, 3, 6);
    const std::vector<Elem> pts7{0, 1, 5};
    CHECK(multipoint_eval(Poly(f7, {0, 1}), pts7) == std::vector<Elem>{0, 1, 5});
}

TEST_CASE("multipoint_eval equals pointwise Horner, including repeated points") {
    SplitRng rng(13);
    for (const std::uint64_t p : kPrimes) {
        const FieldCtx f(p, 1 % p, 1);
        for (int it = 0; it < 30; ++it) {
            const std::size_t deg = rng.below(513);
            const std::size_t m = 1 + rng.below(512);
            const auto c = random_coeffs(rng, deg + 1, p);
            std::vector<Elem> pts(m);
            for (auto& x : pts) {
                x = rng.below(4) == 0 && p > 17 ? rng.below(8) : rng.below(p);  // force repeats
            }
            const auto got = multipoint_eval(Poly(f, c), pts);
            REQUIRE(got.size() == m);
            std::size_t bad = 0;
            for (std::size_t u = 0; u < m; ++u) {
                bad += got[u] != oracle::horner(as_u64(c), pts[u], p);
            }
            CHECK(bad == 0);
        }
    }
}

TEST_CASE("evaluation is a ring homomorphism") {
    SplitRng rng(17);
    const std::uint64_t p = 262147;
    const FieldCtx f(p, 1, 1);
    for (int it = 0; it < 50; ++it) {
        const Poly a(f, random_coeffs(rng, 1 + rng.below(200), p));
        const Poly b(f, random_coeffs(rng, 1 + rng.below(200), p));
        const Elem x = rng.below(p);
        CHECK(horner_eval(poly_mul(a, b), x) == f.mul(horner_eval(a, x), horner_eval(b, x)));
    }
}

TEST_CASE("geometric evaluator matches Horner") {
    SplitRng rng(19);
    for (const std::uint64_t p : kPrimes) {
        const FieldCtx f(p, 1 % p, 1);
        for (int it = 0; it < 20; ++it) {
            const std::size_t max_len = 1 + rng.below(700);
            const std::size_t count = 1 + rng.below(700);
            const Elem start = rng.below(p);
            const Elem ratio = rng.below(5) == 0 ? 0 : rng.below(p);
            const GeometricEvaluator ge(f, start, ratio, count, max_len);
            const auto c = random_coeffs(rng, 1 + rng.below(max_len), p);
            const auto got = ge.evaluate(c);
            REQUIRE(got.size() == count);
            std::size_t bad = 0;
            Elem x = start;
            for (std::size_t u = 0; u < count; ++u) {
                bad += got[u] != oracle::horner(as_u64(c), x, p);
                x = oracle::mulmod(x, ratio, p);
            }
            CHECK(bad == 0);
        }
    }
}

TEST_CASE("geometric evaluator rejects oversized input") {
    const FieldCtx f(17, 3, 16);
    const GeometricEvaluator ge(f, 1, 3, 4, 3);
    const std::vector<Elem> c{1, 2, 3, 4};
    CHECK_THROWS_AS(ge.evaluate(c), UsageError);
}

} // TEST_SUITE
