#pragma once

// Deterministic zero testing of A'B' through the fingerprint polynomial
//   g(X) = sum_k q_k(X) * r_k(X^l),
// whose coefficient of X^(i + l j) is (A'B')_ij, and its lift to integer
// product verification. Also hosts the randomized and flawed baselines.

#include "mmv/field.hpp"
#include "mmv/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmv {

/// Coefficient vectors of g^{I,J}: q_k(Z) = sum_s A'[i0 + s][k] Z^s and
/// r_k(Z) = sum_s B'[k][j0 + s] Z^s, for k < terms, each of length ell.
struct GPolyRep {
    FieldCtx ctx;
    std::size_t ell = 0;
    std::size_t terms = 0;
    std::vector<Elem> qs;  // terms x ell
    std::vector<Elem> rs;  // terms x ell

    GPolyRep(const FieldCtx& c, std::size_t ell, std::size_t terms);

    std::span<const Elem> q(std::size_t k) const noexcept { return {qs.data() + k * ell, ell}; }
    std::span<const Elem> r(std::size_t k) const noexcept { return {rs.data() + k * ell, ell}; }
    std::span<Elem> q(std::size_t k) noexcept { return {qs.data() + k * ell, ell}; }
    std::span<Elem> r(std::size_t k) noexcept { return {rs.data() + k * ell, ell}; }

    /// Expanded coefficients of g (length ell^2). Test oracle; O(terms ell^2).
    std::vector<Elem> expand() const;
};

/// Representation for rows [i0, i0 + ell) of A' and columns [j0, j0 + ell)
/// of B' (A' is m x k, B' is k x m').
GPolyRep build_gpoly(const DenseIntMatrix& a_prime, const DenseIntMatrix& b_prime, const FieldCtx& ctx,
                     std::size_t i0, std::size_t j0, std::size_t ell);
/// Same for the augmented layout over the submatrix s.
GPolyRep build_gpoly(const AugmentedPair& pair, const FieldCtx& ctx, const SubmatrixId& s);
/// Whole augmented pair (s = root).
GPolyRep build_gpoly(const AugmentedPair& pair, const FieldCtx& ctx);

/// g at arbitrary points. Terms with q_k or r_k identically zero are
/// skipped; geometric point lists take the chirp path. If evals is non-null
/// it is increased by the number of (polynomial, point) evaluations done.
std::vector<Elem> eval_g_batch(const GPolyRep& rep, std::span<const Elem> points, std::uint64_t* evals = nullptr);
/// g at start * ratio^u for u < count.
std::vector<Elem> eval_g_geometric(const GPolyRep& rep, Elem start, Elem ratio, std::size_t count,
                                   std::uint64_t* evals = nullptr);

struct ZeroTestResult {
    bool zero = true;
    std::size_t witness = 0;  // least nu with g(omega^nu) != 0 when !zero
    std::size_t t_used = 0;   // after clamping to ell^2
    std::uint64_t evaluations = 0;
};

/// Evaluates g at omega^0..omega^(t-1), t clamped to ell^2. Requires t >= 1
/// and an omega whose order bound covers ell^2.
ZeroTestResult all_zeroes_test(const GPolyRep& rep, std::size_t t);
ZeroTestResult all_zeroes_test(const DenseIntMatrix& a_prime, const DenseIntMatrix& b_prime, std::size_t t,
                               const FieldCtx& ctx);

enum class Verdict { equal, not_equal };

/// "C=AB" / "C!=AB".
const char* to_string(Verdict v) noexcept;

struct VerifyOutcome {
    Verdict verdict = Verdict::equal;
    std::size_t primes_total = 0;
    std::size_t primes_tested = 0;
    std::size_t t_used = 0;
    std::uint64_t evaluations = 0;
    /// On "C!=AB": the prime that exposed the difference and its least nu.
    std::optional<std::uint64_t> witness_prime;
    std::optional<std::size_t> witness_nu;
    /// Sampling mode: entry found by the random stage.
    std::optional<std::pair<std::size_t, std::size_t>> witness_entry;
};

/// Deterministic verification assuming at most t differences. A is l x n,
/// B is n x l, C is l x l (square inputs are the usual case).
VerifyOutcome mm_verify_t(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c, std::size_t t);

/// Freivalds with 0/1 vectors; error probability <= 2^-reps.
VerifyOutcome freivalds_verify(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c,
                               std::size_t reps, std::uint64_t seed);

/// mm_verify_t with t = n, then 4n random entries checked exactly.
VerifyOutcome sampling_verify(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c,
                              std::uint64_t seed);

/// p(r) = x(r)^T (AB - C) x(r) over F_p with x(r) = (1, r, r^2, ...).
/// This test misses cancellations; kept only as a negative control.
std::vector<Elem> flawed_bilinear_test(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c,
                                       std::span<const Elem> points, const FieldCtx& ctx);

} // namespace mmv
