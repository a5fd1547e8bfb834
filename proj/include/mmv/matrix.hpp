#pragma once

// Dense integer matrices, the augmented pair A' = (A C), B' = (B; -I), the
// canonical submatrix grid, and the text file format.

#include "mmv/field.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mmv {

/// Magnitude cap for parsed entries: |x| < 2^40.
inline constexpr std::int64_t kMaxParsedEntry = std::int64_t{1} << 40;

/// Row-major int64 matrix. max_abs() is an upper bound on |entry|, raised on
/// every write and never lowered.
class DenseIntMatrix {
public:
    /// Zero matrix; rows, cols >= 1.
    DenseIntMatrix(std::size_t rows, std::size_t cols);

    static DenseIntMatrix identity(std::size_t n);
    static DenseIntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);
    static DenseIntMatrix from_rows(std::initializer_list<std::initializer_list<std::int64_t>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    std::uint64_t max_abs() const noexcept { return max_abs_; }

    std::int64_t at(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, std::int64_t v) noexcept;
    std::span<const std::int64_t> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const std::int64_t> data() const noexcept { return data_; }

    DenseIntMatrix transposed() const;
    /// Entries reduced into F_p, row-major.
    std::vector<Elem> reduced(const FieldCtx& ctx) const;
    /// Same, of the transpose.
    std::vector<Elem> reduced_transposed(const FieldCtx& ctx) const;
    /// Number of entries that differ; dimensions must match.
    std::size_t count_differences(const DenseIntMatrix& other) const;

    friend bool operator==(const DenseIntMatrix& a, const DenseIntMatrix& b) noexcept {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::int64_t> data_;
    std::uint64_t max_abs_ = 0;
};

/// A' = (A C) (l x (n + l)) and B' = (B; -I) ((n + l) x l) for A l x n,
/// B n x l, C l x l. Holds references; C is read live, so writes to it are
/// seen by A'. Inner index k < n addresses A/B, k = n + j addresses C/-I.
class AugmentedPair {
public:
    AugmentedPair(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c);

    std::size_t ell() const noexcept { return c_->rows(); }
    std::size_t n() const noexcept { return a_->cols(); }
    std::size_t inner() const noexcept { return n() + ell(); }

    std::int64_t a_prime(std::size_t i, std::size_t k) const noexcept {
        return k < n() ? a_->at(i, k) : c_->at(i, k - n());
    }
    std::int64_t b_prime(std::size_t k, std::size_t j) const noexcept {
        return k < n() ? b_->at(k, j) : (k - n() == j ? -1 : 0);
    }

    const DenseIntMatrix& a() const noexcept { return *a_; }
    const DenseIntMatrix& b() const noexcept { return *b_; }
    const DenseIntMatrix& c() const noexcept { return *c_; }

    /// <a_i, b_j> over the integers (128-bit accumulation).
    i128 inner_product(std::size_t i, std::size_t j) const;
    /// (A'B')_{ij} = <a_i, b_j> - C_ij.
    i128 difference(std::size_t i, std::size_t j) const { return inner_product(i, j) - c_->at(i, j); }
    /// Bound on |(A'B')_{ij}|: n * maxA * maxB + maxC, saturating.
    u128 magnitude_bound() const noexcept;

    DenseIntMatrix materialize_a() const;
    DenseIntMatrix materialize_b() const;

private:
    const DenseIntMatrix* a_;
    const DenseIntMatrix* b_;
    const DenseIntMatrix* c_;
};

/// Canonical submatrix I x J with I = [i_start, i_start + side), same for J
/// (0-indexed, half-open).
struct SubmatrixId {
    std::size_t i_start = 0;
    std::size_t j_start = 0;
    std::size_t side = 1;

    static SubmatrixId root(std::size_t n) { return {0, 0, n}; }

    bool is_leaf() const noexcept { return side == 1; }
    bool contains(std::size_t i, std::size_t j) const noexcept {
        return i - i_start < side && j - j_start < side;
    }
    /// Children in order (1,1), (1,2), (2,1), (2,2). UsageError at a leaf.
    std::array<SubmatrixId, 4> split() const;
    SubmatrixId child(std::size_t index) const;
    /// Index (0..3) of the child containing (i, j); requires contains(i, j).
    std::size_t child_index(std::size_t i, std::size_t j) const noexcept;

    friend bool operator==(const SubmatrixId&, const SubmatrixId&) = default;
};

struct SubmatrixIdHash {
    std::size_t operator()(const SubmatrixId& s) const noexcept {
        std::uint64_t h = s.i_start * 0x9E3779B97F4A7C15ULL;
        h ^= s.j_start + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
        h ^= s.side + 0x85EBCA77C2B2AE63ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

/// 1-indexed inclusive ranges, e.g. "rows 1-2 cols 3-4".
std::string to_string(const SubmatrixId& s);

struct PaddedTriple {
    DenseIntMatrix a;
    DenseIntMatrix b;
    DenseIntMatrix c;
    std::size_t n_padded;
};

/// Zero-pads square n x n inputs to the next power of two.
PaddedTriple pad_to_pow2(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c);

/// Parse errors carry 1-based line numbers.
DenseIntMatrix read_matrix(std::istream& in);
DenseIntMatrix read_matrix(const std::string& path);
void write_matrix(std::ostream& out, const DenseIntMatrix& m);
void write_matrix(const std::string& path, const DenseIntMatrix& m);

/// Exact product with 128-bit accumulation. ResourceError if an
/// accumulation overflows or a result entry does not fit in int64.
DenseIntMatrix naive_multiply(const DenseIntMatrix& a, const DenseIntMatrix& b);

} // namespace mmv
