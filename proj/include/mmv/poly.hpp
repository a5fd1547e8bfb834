#pragma once

#include "mmv/field.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mmv {

namespace detail {
class FixedKernelConvolver;
}

/// Dense univariate polynomial over F_p; coeffs()[i] is the coefficient of X^i.
/// Always normalized: the trailing coefficient is nonzero unless the
/// polynomial is zero, in which case coeffs() is empty.
class Poly {
public:
    explicit Poly(const FieldCtx& ctx) : ctx_(ctx) {}
    /// Coefficients are reduced modulo p.
    Poly(const FieldCtx& ctx, std::vector<Elem> coeffs);

    static Poly from_signed(const FieldCtx& ctx, std::span<const std::int64_t> coeffs);
    static Poly monomial(const FieldCtx& ctx, Elem coeff, std::size_t exponent);

    const FieldCtx& ctx() const noexcept { return ctx_; }
    std::span<const Elem> coeffs() const noexcept { return coeffs_; }
    /// -1 for the zero polynomial.
    std::ptrdiff_t degree() const noexcept { return static_cast<std::ptrdiff_t>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    Elem coeff(std::size_t i) const noexcept { return i < coeffs_.size() ? coeffs_[i] : 0; }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.ctx_.modulus() == b.ctx_.modulus() && a.coeffs_ == b.coeffs_;
    }

private:
    FieldCtx ctx_;
    std::vector<Elem> coeffs_;
};

struct DivRem {
    Poly quotient;
    Poly remainder;
};

/// Throws UsageError when the operands live in different fields.
Poly poly_mul(const Poly& f, const Poly& g);
/// f = q*g + r with deg r < deg g. Throws DomainError when g is zero.
DivRem poly_divrem(const Poly& f, const Poly& g);
Elem horner_eval(const Poly& f, Elem x);
/// (f(x_1), ..., f(x_m)); subproduct tree above the size threshold, Horner below.
std::vector<Elem> multipoint_eval(const Poly& f, std::span<const Elem> points);

/// Subproduct tree over a fixed point list, reusable across polynomials.
/// Each child node keeps the reversed-modulus inverse it needs, so one
/// remainder step costs two multiplications.
class MultipointEvaluator {
public:
    MultipointEvaluator(const FieldCtx& ctx, std::vector<Elem> points);

    const FieldCtx& ctx() const noexcept { return ctx_; }
    std::span<const Elem> points() const noexcept { return points_; }

    std::vector<Elem> evaluate(const Poly& f) const;
    /// Coefficients must already be reduced.
    std::vector<Elem> evaluate(std::span<const Elem> coeffs) const;
    /// Writes f(x_u) into out, which must hold points().size() entries.
    void evaluate_into(std::span<const Elem> coeffs, std::span<Elem> out) const;

private:
    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        int left = -1;
        int right = -1;
        std::vector<Elem> modulus;  // monic, degree end - begin
        std::vector<Elem> inv_rev;  // 1/rev(modulus) mod X^k, k = parent size - own size
    };

    int build(std::size_t begin, std::size_t end, std::size_t parent_size);
    void descend(int node, std::vector<Elem> rem, std::span<Elem> out) const;

    FieldCtx ctx_;
    std::vector<Elem> points_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

/// Evaluation at the geometric progression start * ratio^u, u < count, by a
/// chirp transform: with i*u = C(i+u,2) - C(i,2) - C(u,2), every evaluation
/// becomes one cyclic convolution against a fixed kernel ratio^C(k,2).
/// Polynomials may have up to max_len coefficients.
class GeometricEvaluator {
public:
    GeometricEvaluator(const FieldCtx& ctx, Elem start, Elem ratio, std::size_t count, std::size_t max_len);
    ~GeometricEvaluator();
    GeometricEvaluator(GeometricEvaluator&&) noexcept;
    GeometricEvaluator& operator=(GeometricEvaluator&&) noexcept;

    const FieldCtx& ctx() const noexcept { return ctx_; }
    std::size_t size() const noexcept { return points_.size(); }
    std::size_t max_len() const noexcept { return max_len_; }
    std::span<const Elem> points() const noexcept { return points_; }

    std::vector<Elem> evaluate(std::span<const Elem> coeffs) const;
    void evaluate_into(std::span<const Elem> coeffs, std::span<Elem> out) const;

private:
    FieldCtx ctx_;
    std::size_t max_len_;
    std::vector<Elem> points_;
    std::vector<Elem> pre_;   // start^i * ratio^-C(i,2)
    std::vector<Elem> post_;  // ratio^-C(u,2)
    std::unique_ptr<detail::FixedKernelConvolver> conv_;
};

namespace detail {

inline constexpr std::size_t kKaratsubaThreshold = 32;
inline constexpr std::size_t kNttThreshold = 128;
inline constexpr std::size_t kTreeThreshold = 64;
inline constexpr std::size_t kLeafSize = 32;
inline constexpr std::size_t kChirpThreshold = 32;

std::vector<Elem> schoolbook_mul(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx);
std::vector<Elem> karatsuba_mul(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx);
/// Dispatching product of raw coefficient vectors (not normalized).
std::vector<Elem> mul(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx);
/// 1/h mod X^k; requires h[0] != 0.
std::vector<Elem> series_inverse(std::span<const Elem> h, std::size_t k, const FieldCtx& ctx);
Elem horner(std::span<const Elem> coeffs, Elem x, const FieldCtx& ctx) noexcept;
/// out[u] = f(points[u]); interleaves several points to hide multiply latency.
void horner_batch(std::span<const Elem> coeffs, std::span<const Elem> points, std::span<Elem> out,
                  const FieldCtx& ctx) noexcept;

} // namespace detail

} // namespace mmv
