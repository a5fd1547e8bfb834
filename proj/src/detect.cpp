#include "mmv/detect.hpp"

#include "mmv/errors.hpp"
#include "mmv/poly.hpp"
#include "mmv/random.hpp"

#include <algorithm>
#include <optional>

namespace mmv {

namespace {

enum class Shape { zero, monomial, dense };

struct PolyShape {
    Shape shape = Shape::zero;
    std::size_t len = 0;  // trimmed length
    std::size_t exp = 0;  // monomial exponent
    Elem coeff = 0;       // monomial coefficient
};

PolyShape classify(std::span<const Elem> c) noexcept {
    PolyShape s;
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] != 0) {
            if (nonzero++ == 0) {
                s.exp = i;
                s.coeff = c[i];
            }
            s.len = i + 1;
        }
    }
    s.shape = nonzero == 0 ? Shape::zero : nonzero == 1 ? Shape::monomial : Shape::dense;
    return s;
}

// Evaluates polynomials at a fixed point set, choosing the cheapest route
// per polynomial. The heavy evaluator is built on first use.
class PointSet {
public:
    // Geometric: start * ratio^u.
    PointSet(const FieldCtx& ctx, Elem start, Elem ratio, std::size_t count, std::size_t max_len)
        : ctx_(ctx), geometric_(true), start_(start), ratio_(ratio), count_(count), max_len_(max_len) {}
    // Arbitrary.
    PointSet(const FieldCtx& ctx, std::vector<Elem> points, std::size_t max_len)
        : ctx_(ctx), geometric_(false), count_(points.size()), max_len_(max_len), points_(std::move(points)) {}

    void evaluate(std::span<const Elem> coeffs, const PolyShape& s, std::span<Elem> out) {
        if (s.shape == Shape::monomial) {
            if (geometric_) {
                Elem v = ctx_.mul(s.coeff, ctx_.pow(start_, s.exp));
                const Elem step = ctx_.pow(ratio_, s.exp);
                for (std::size_t u = 0; u < count_; ++u) {
                    out[u] = v;
                    v = ctx_.mul(v, step);
                }
            } else {
                for (std::size_t u = 0; u < count_; ++u) {
                    out[u] = ctx_.mul(s.coeff, ctx_.pow(points_[u], s.exp));
                }
            }
            return;
        }
        const auto trimmed = coeffs.first(s.len);
        if (geometric_) {
            if (!geo_) {
                geo_.emplace(ctx_, start_, ratio_, count_, max_len_);
            }
            geo_->evaluate_into(trimmed, out);
        } else {
            if (!tree_) {
                tree_.emplace(ctx_, points_);
            }
            tree_->evaluate_into(trimmed, out);
        }
    }

private:
    const FieldCtx& ctx_;
    bool geometric_;
    Elem start_ = 0;
    Elem ratio_ = 0;
    std::size_t count_;
    std::size_t max_len_;
    std::vector<Elem> points_;
    std::optional<GeometricEvaluator> geo_;
    std::optional<MultipointEvaluator> tree_;
};

std::vector<Elem> accumulate_g(const GPolyRep& rep, PointSet& xs, PointSet& ys, std::size_t count,
                               std::uint64_t* evals) {
    const FieldCtx& ctx = rep.ctx;
    std::vector<Elem> acc(count, 0);
    std::vector<Elem> qv(count);
    std::vector<Elem> rv(count);
    std::uint64_t done = 0;
    for (std::size_t k = 0; k < rep.terms; ++k) {
        const PolyShape qs = classify(rep.q(k));
        if (qs.shape == Shape::zero) {
            continue;
        }
        const PolyShape rs = classify(rep.r(k));
        if (rs.shape == Shape::zero) {
            continue;
        }
        xs.evaluate(rep.q(k), qs, qv);
        ys.evaluate(rep.r(k), rs, rv);
        for (std::size_t u = 0; u < count; ++u) {
            acc[u] = ctx.add(acc[u], ctx.mul(qv[u], rv[u]));
        }
        done += 2 * count;
    }
    if (evals) {
        *evals += done;
    }
    return acc;
}

void check_dims(const AugmentedPair& pair, const SubmatrixId& s) {
    if (s.side == 0 || s.i_start + s.side > pair.ell() || s.j_start + s.side > pair.ell()) {
        throw UsageError("submatrix outside the matrix");
    }
}

// dst[k * ell + s] = src(row0 + s, col0 + k) mod p for s < ell, k < cols,
// in tiles to keep both sides cache-resident.
void gather_columns(const DenseIntMatrix& src, std::size_t row0, std::size_t col0, std::size_t ell,
                    std::size_t cols, const FieldCtx& ctx, Elem* dst) {
    constexpr std::size_t kTile = 32;
    for (std::size_t s0 = 0; s0 < ell; s0 += kTile) {
        const std::size_t s1 = std::min(ell, s0 + kTile);
        for (std::size_t k0 = 0; k0 < cols; k0 += kTile) {
            const std::size_t k1 = std::min(cols, k0 + kTile);
            for (std::size_t s = s0; s < s1; ++s) {
                const std::int64_t* row = src.row(row0 + s).data() + col0;
                for (std::size_t k = k0; k < k1; ++k) {
                    dst[k * ell + s] = ctx.from_int(row[k]);
                }
            }
        }
    }
}

std::optional<Elem> common_ratio(std::span<const Elem> points, const FieldCtx& ctx) {
    if (points.size() < 2 || points[0] == 0) {
        return std::nullopt;
    }
    const Elem ratio = ctx.mul(points[1], ctx.inv(points[0]));
    for (std::size_t u = 1; u < points.size(); ++u) {
        if (points[u] != ctx.mul(points[u - 1], ratio)) {
            return std::nullopt;
        }
    }
    return ratio;
}

} // namespace

GPolyRep::GPolyRep(const FieldCtx& c, std::size_t ell, std::size_t terms)
    : ctx(c), ell(ell), terms(terms), qs(ell * terms, 0), rs(ell * terms, 0) {}

std::vector<Elem> GPolyRep::expand() const {
    std::vector<Elem> g(ell * ell, 0);
    for (std::size_t k = 0; k < terms; ++k) {
        const auto qk = q(k);
        const auto rk = r(k);
        for (std::size_t i = 0; i < ell; ++i) {
            if (qk[i] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < ell; ++j) {
                g[i + ell * j] = ctx.add(g[i + ell * j], ctx.mul(qk[i], rk[j]));
            }
        }
    }
    return g;
}

GPolyRep build_gpoly(const DenseIntMatrix& a_prime, const DenseIntMatrix& b_prime, const FieldCtx& ctx,
                     std::size_t i0, std::size_t j0, std::size_t ell) {
    if (a_prime.cols() != b_prime.rows()) {
        throw UsageError("inner dimensions differ");
    }
    if (ell == 0 || i0 + ell > a_prime.rows() || j0 + ell > b_prime.cols()) {
        throw UsageError("block outside the matrices");
    }
    GPolyRep rep(ctx, ell, a_prime.cols());
    gather_columns(a_prime, i0, 0, ell, rep.terms, ctx, rep.qs.data());
    for (std::size_t k = 0; k < rep.terms; ++k) {
        const auto brow = b_prime.row(k);
        for (std::size_t s = 0; s < ell; ++s) {
            rep.rs[k * ell + s] = ctx.from_int(brow[j0 + s]);
        }
    }
    return rep;
}

// Only the C-columns inside J are kept: for the others r_{n+j} is zero.
// Term n + s stands for column j0 + s.
GPolyRep build_gpoly(const AugmentedPair& pair, const FieldCtx& ctx, const SubmatrixId& sub) {
    check_dims(pair, sub);
    const std::size_t n = pair.n();
    const std::size_t ell = sub.side;
    GPolyRep rep(ctx, ell, n + ell);
    gather_columns(pair.a(), sub.i_start, 0, ell, n, ctx, rep.qs.data());
    gather_columns(pair.c(), sub.i_start, sub.j_start, ell, ell, ctx, rep.qs.data() + n * ell);
    for (std::size_t k = 0; k < n; ++k) {
        const auto brow = pair.b().row(k);
        for (std::size_t s = 0; s < ell; ++s) {
            rep.rs[k * ell + s] = ctx.from_int(brow[sub.j_start + s]);
        }
    }
    for (std::size_t jj = 0; jj < ell; ++jj) {
        rep.rs[(n + jj) * ell + jj] = ctx.neg(1);
    }
    return rep;
}

GPolyRep build_gpoly(const AugmentedPair& pair, const FieldCtx& ctx) {
    return build_gpoly(pair, ctx, SubmatrixId::root(pair.ell()));
}

std::vector<Elem> eval_g_geometric(const GPolyRep& rep, Elem start, Elem ratio, std::size_t count,
                                   std::uint64_t* evals) {
    const FieldCtx& ctx = rep.ctx;
    start %= ctx.modulus();
    ratio %= ctx.modulus();
    PointSet xs(ctx, start, ratio, count, rep.ell);
    PointSet ys(ctx, ctx.pow(start, rep.ell), ctx.pow(ratio, rep.ell), count, rep.ell);
    return accumulate_g(rep, xs, ys, count, evals);
}

std::vector<Elem> eval_g_batch(const GPolyRep& rep, std::span<const Elem> points, std::uint64_t* evals) {
    const FieldCtx& ctx = rep.ctx;
    if (auto ratio = common_ratio(points, ctx)) {
        return eval_g_geometric(rep, points[0], *ratio, points.size(), evals);
    }
    std::vector<Elem> xv(points.begin(), points.end());
    std::vector<Elem> yv(points.size());
    for (std::size_t u = 0; u < points.size(); ++u) {
        yv[u] = ctx.pow(xv[u], rep.ell);
    }
    PointSet xs(ctx, std::move(xv), rep.ell);
    PointSet ys(ctx, std::move(yv), rep.ell);
    return accumulate_g(rep, xs, ys, points.size(), evals);
}

ZeroTestResult all_zeroes_test(const GPolyRep& rep, std::size_t t) {
    if (t == 0) {
        throw UsageError("t must be at least 1");
    }
    const std::size_t full = rep.ell * rep.ell;
    if (rep.ctx.order_lb() < full) {
        throw DomainError("root of unity order does not cover l^2");
    }
    ZeroTestResult res;
    res.t_used = std::min(t, full);
    const auto values = eval_g_geometric(rep, 1, rep.ctx.omega(), res.t_used, &res.evaluations);
    const auto hit = std::find_if(values.begin(), values.end(), [](Elem v) { return v != 0; });
    if (hit != values.end()) {
        res.zero = false;
        res.witness = static_cast<std::size_t>(hit - values.begin());
    }
    return res;
}

ZeroTestResult all_zeroes_test(const DenseIntMatrix& a_prime, const DenseIntMatrix& b_prime, std::size_t t,
                               const FieldCtx& ctx) {
    if (a_prime.rows() != b_prime.cols()) {
        throw UsageError("A'B' must be square");
    }
    return all_zeroes_test(build_gpoly(a_prime, b_prime, ctx, 0, 0, a_prime.rows()), t);
}

const char* to_string(Verdict v) noexcept {
    return v == Verdict::equal ? "C=AB" : "C!=AB";
}

VerifyOutcome mm_verify_t(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c,
                          std::size_t t) {
    const AugmentedPair pair(a, b, c);
    if (t == 0) {
        throw UsageError("t must be at least 1");
    }
    const CrtBasis basis = build_crt_basis(pair.ell(), pair.magnitude_bound());
    VerifyOutcome out;
    out.primes_total = basis.size();
    for (const FieldCtx& ctx : basis.fields) {
        const ZeroTestResult r = all_zeroes_test(build_gpoly(pair, ctx), t);
        ++out.primes_tested;
        out.t_used = r.t_used;
        out.evaluations += r.evaluations;
        if (!r.zero) {
            out.verdict = Verdict::not_equal;
            out.witness_prime = ctx.modulus();
            out.witness_nu = r.witness;
            break;
        }
    }
    return out;
}

namespace {

i128 checked_add(i128 a, i128 b) {
    i128 r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw ResourceError("128-bit accumulation overflow");
    }
    return r;
}

i128 checked_mul(i128 a, i128 b) {
    i128 r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw ResourceError("128-bit accumulation overflow");
    }
    return r;
}

} // namespace

VerifyOutcome freivalds_verify(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c,
                               std::size_t reps, std::uint64_t seed) {
    const AugmentedPair pair(a, b, c);
    if (reps == 0) {
        throw UsageError("reps must be at least 1");
    }
    const std::size_t ell = pair.ell();
    const std::size_t n = pair.n();
    SplitRng rng(seed);
    VerifyOutcome out;
    std::vector<std::int64_t> v(ell);
    std::vector<i128> bv(n);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        for (auto& x : v) {
            x = static_cast<std::int64_t>(rng.below(2));
        }
        for (std::size_t k = 0; k < n; ++k) {
            i128 s = 0;
            const auto row = b.row(k);
            for (std::size_t j = 0; j < ell; ++j) {
                s += v[j] ? row[j] : 0;
            }
            bv[k] = s;
        }
        for (std::size_t i = 0; i < ell; ++i) {
            i128 lhs = 0;
            const auto arow = a.row(i);
            for (std::size_t k = 0; k < n; ++k) {
                lhs = checked_add(lhs, checked_mul(arow[k], bv[k]));
            }
            i128 rhs = 0;
            const auto crow = c.row(i);
            for (std::size_t j = 0; j < ell; ++j) {
                rhs += v[j] ? crow[j] : 0;
            }
            if (lhs != rhs) {
                out.verdict = Verdict::not_equal;
                return out;
            }
        }
    }
    return out;
}

VerifyOutcome sampling_verify(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c,
                              std::uint64_t seed) {
    const AugmentedPair pair(a, b, c);
    const std::size_t ell = pair.ell();
    VerifyOutcome out = mm_verify_t(a, b, c, ell);
    if (out.verdict == Verdict::not_equal) {
        return out;
    }
    SplitRng rng(seed);
    for (std::size_t s = 0; s < 4 * ell; ++s) {
        const std::size_t i = rng.below(ell);
        const std::size_t j = rng.below(ell);
        if (pair.difference(i, j) != 0) {
            out.verdict = Verdict::not_equal;
            out.witness_entry = {i, j};
            break;
        }
    }
    return out;
}

std::vector<Elem> flawed_bilinear_test(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c,
                                       std::span<const Elem> points, const FieldCtx& ctx) {
    const AugmentedPair pair(a, b, c);
    const std::size_t ell = pair.ell();
    const std::size_t n = pair.n();
    const auto ar = a.reduced(ctx);
    const auto br = b.reduced(ctx);
    const auto cr = c.reduced(ctx);
    std::vector<Elem> out;
    out.reserve(points.size());
    std::vector<Elem> x(ell);
    std::vector<Elem> xa(n);
    for (Elem r : points) {
        r %= ctx.modulus();
        x = ctx.geometric(r, ell);
        // x^T A B x - x^T C x, without forming AB - C.
        std::fill(xa.begin(), xa.end(), 0);
        Elem cx = 0;
        for (std::size_t i = 0; i < ell; ++i) {
            Elem crow = 0;
            for (std::size_t k = 0; k < n; ++k) {
                xa[k] = ctx.add(xa[k], ctx.mul(x[i], ar[i * n + k]));
            }
            for (std::size_t j = 0; j < ell; ++j) {
                crow = ctx.add(crow, ctx.mul(cr[i * ell + j], x[j]));
            }
            cx = ctx.add(cx, ctx.mul(x[i], crow));
        }
        Elem abx = 0;
        for (std::size_t k = 0; k < n; ++k) {
            Elem bx = 0;
            for (std::size_t j = 0; j < ell; ++j) {
                bx = ctx.add(bx, ctx.mul(br[k * ell + j], x[j]));
            }
            abx = ctx.add(abx, ctx.mul(xa[k], bx));
        }
        out.push_back(ctx.sub(abx, cx));
    }
    return out;
}

} // namespace mmv
