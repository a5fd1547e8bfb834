#pragma once

// Instance builders for two structural reductions of product verification:
// Boolean verification to 3SUM (ones certified by witnesses, zeros encoded
// as a 3SUM instance) and integer verification to univariate polynomial
// identity testing (an arithmetic circuit for the fingerprint g).

#include "mmv/field.hpp"
#include "mmv/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmv {

// ---------------------------------------------------------------- 3SUM side

struct Witness {
    std::size_t row = 0;  // 0-indexed
    std::size_t col = 0;
    std::size_t k = 0;
};

struct OnesCertificate {
    std::vector<Witness> witnesses;  // row-major over the ones of C
    std::optional<std::pair<std::size_t, std::size_t>> failure;
    bool ok() const noexcept { return !failure.has_value(); }
};

/// For each one of C the least k with A[i][k] = B[k][j] = 1; stops at the
/// first one without a witness. Inputs must be square 0/1 matrices.
OnesCertificate bmm_ones_certificate(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c);

struct ThreeSumInstance {
    std::int64_t w = 0;
    std::vector<std::int64_t> s1, s2, s3;  // sorted, distinct
    std::map<std::int64_t, std::pair<std::size_t, std::size_t>> zero_map;  // s3 element -> 0-indexed (i, j)
};

/// With 1-indexed i, j, k and W = 2(n+1): S1 = {iW^2 + k : A_ik = 1},
/// S2 = {jW - k : B_kj = 1}, S3 = {iW^2 + jW : C_ij = 0}. A solution
/// exists iff some zero of C is wrong.
ThreeSumInstance bmm_zeroes_to_3sum(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c);

inline constexpr std::uint64_t kThreeSumPairBudget = 10'000'000;

/// (s1, s2, s3) with s1 + s2 = s3, scanning pairs; ResourceError when
/// |S1| |S2| exceeds the budget.
std::optional<std::array<std::int64_t, 3>> three_sum_find(const std::vector<std::int64_t>& s1,
                                                          const std::vector<std::int64_t>& s2,
                                                          const std::vector<std::int64_t>& s3,
                                                          std::uint64_t budget = kThreeSumPairBudget);
bool three_sum_bruteforce(const std::vector<std::int64_t>& s1, const std::vector<std::int64_t>& s2,
                          const std::vector<std::int64_t>& s3, std::uint64_t budget = kThreeSumPairBudget);

/// Three lines of space-separated integers (S1, S2, S3).
void write_three_sum(std::ostream& os, const ThreeSumInstance& inst);

// ---------------------------------------------------------------- UPIT side

enum class GateOp : std::uint8_t { input, constant, add, mul };

struct Gate {
    GateOp op = GateOp::constant;
    Elem value = 0;         // constant gates
    std::uint32_t lhs = 0;  // add/mul operands, gate indices
    std::uint32_t rhs = 0;
};

struct CircuitDesc {
    std::uint64_t modulus = 0;
    std::vector<Gate> gates;
    std::uint32_t output = 0;
    std::size_t wire_count = 0;  // operand edges
    std::size_t degree = 0;      // syntactic degree of the output gate
};

/// Circuit for g(X) = sum_k q_k(X) r_k(X^l) with q_k from column k of A
/// (l x m) and r_k from row k of B (m x l): Horner chains per k, one shared
/// X^l by repeated squaring, and a balanced sum. Zero polynomials are
/// skipped and constants are shared. g is zero iff AB = 0; pass the
/// augmented pair to test C = AB.
CircuitDesc emit_upit_circuit(const DenseIntMatrix& a, const DenseIntMatrix& b, const FieldCtx& ctx);

/// ValidationError on an operand that does not precede its gate.
Elem eval_circuit(const CircuitDesc& circ, Elem x, const FieldCtx& ctx);

/// Gate-list text: "g7 = MUL g3 g6", ..., "OUTPUT g9".
void write_circuit(std::ostream& os, const CircuitDesc& circ);
/// Inverse of write_circuit; ParseError with a line number.
CircuitDesc read_circuit(std::istream& is);

} // namespace mmv
