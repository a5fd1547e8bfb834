#include "mmv/poly.hpp"

#include "mmv/errors.hpp"
#include "ntt.hpp"

#include <algorithm>

namespace mmv {

namespace {

void trim(std::vector<Elem>& c) {
    while (!c.empty() && c.back() == 0) {
        c.pop_back();
    }
}

void require_same_field(const Poly& f, const Poly& g) {
    if (f.ctx().modulus() != g.ctx().modulus()) {
        throw UsageError("polynomials belong to different fields");
    }
}

Elem reduce128(u128 x, const FieldCtx& ctx) {
    auto lo = static_cast<std::uint64_t>(x);
    auto hi = static_cast<std::uint64_t>(x >> 64);
    Elem r = ctx.reduce(lo);
    if (hi != 0) {
        // 2^64 mod p
        Elem two64 = ctx.reduce(static_cast<std::uint64_t>((u128{1} << 64) % ctx.modulus()));
        r = ctx.add(r, ctx.mul(ctx.reduce(hi), two64));
    }
    return r;
}

// Low `len` coefficients of f - q*m where only those are needed.
std::vector<Elem> remainder_with_inverse(std::span<const Elem> f, std::span<const Elem> modulus,
                                         std::span<const Elem> inv_rev, const FieldCtx& ctx) {
    const std::size_t m = modulus.size() - 1;
    if (f.size() <= m) {
        return {f.begin(), f.end()};
    }
    const std::size_t qlen = f.size() - m;
    std::vector<Elem> head(qlen);
    for (std::size_t i = 0; i < qlen; ++i) {
        head[i] = f[f.size() - 1 - i];
    }
    std::vector<Elem> qrev = detail::mul(head, inv_rev.first(std::min(qlen, inv_rev.size())), ctx);
    qrev.resize(qlen);
    std::reverse(qrev.begin(), qrev.end());
    std::vector<Elem> qm = detail::mul(qrev, modulus.first(std::min(m, modulus.size())), ctx);
    std::vector<Elem> r(m);
    for (std::size_t i = 0; i < m; ++i) {
        r[i] = ctx.sub(f[i], i < qm.size() ? qm[i] : 0);
    }
    return r;
}

} // namespace

Poly::Poly(const FieldCtx& ctx, std::vector<Elem> coeffs) : ctx_(ctx), coeffs_(std::move(coeffs)) {
    for (Elem& c : coeffs_) {
        if (c >= ctx_.modulus()) {
            c %= ctx_.modulus();
        }
    }
    trim(coeffs_);
}

Poly Poly::from_signed(const FieldCtx& ctx, std::span<const std::int64_t> coeffs) {
    std::vector<Elem> c(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        c[i] = ctx.from_int(coeffs[i]);
    }
    return Poly(ctx, std::move(c));
}

Poly Poly::monomial(const FieldCtx& ctx, Elem coeff, std::size_t exponent) {
    std::vector<Elem> c(exponent + 1, 0);
    c[exponent] = coeff;
    return Poly(ctx, std::move(c));
}

namespace detail {

Elem horner(std::span<const Elem> coeffs, Elem x, const FieldCtx& ctx) noexcept {
    Elem acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        acc = ctx.add(ctx.mul(acc, x), coeffs[i]);
    }
    return acc;
}

void horner_batch(std::span<const Elem> coeffs, std::span<const Elem> points, std::span<Elem> out,
                  const FieldCtx& ctx) noexcept {
    std::size_t u = 0;
    for (; u + 4 <= points.size(); u += 4) {
        Elem a0 = 0, a1 = 0, a2 = 0, a3 = 0;
        const Elem x0 = points[u], x1 = points[u + 1], x2 = points[u + 2], x3 = points[u + 3];
        for (std::size_t i = coeffs.size(); i-- > 0;) {
            const Elem c = coeffs[i];
            a0 = ctx.add(ctx.mul(a0, x0), c);
            a1 = ctx.add(ctx.mul(a1, x1), c);
            a2 = ctx.add(ctx.mul(a2, x2), c);
            a3 = ctx.add(ctx.mul(a3, x3), c);
        }
        out[u] = a0;
        out[u + 1] = a1;
        out[u + 2] = a2;
        out[u + 3] = a3;
    }
    for (; u < points.size(); ++u) {
        out[u] = horner(coeffs, points[u], ctx);
    }
}

std::vector<Elem> schoolbook_mul(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx) {
    if (a.empty() || b.empty()) {
        return {};
    }
    std::vector<u128> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::uint64_t ai = a[i];
        if (ai == 0) {
            continue;
        }
        u128* row = acc.data() + i;
        for (std::size_t j = 0; j < b.size(); ++j) {
            row[j] += static_cast<u128>(ai * b[j]);
        }
    }
    std::vector<Elem> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        out[i] = reduce128(acc[i], ctx);
    }
    return out;
}

namespace {

void add_into(std::vector<Elem>& dst, std::size_t offset, std::span<const Elem> src, const FieldCtx& ctx) {
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[offset + i] = ctx.add(dst[offset + i], src[i]);
    }
}

std::vector<Elem> karatsuba_equal(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx) {
    const std::size_t n = a.size();
    if (n < kKaratsubaThreshold) {
        return schoolbook_mul(a, b, ctx);
    }
    const std::size_t m = n / 2;
    auto a0 = a.first(m);
    auto a1 = a.subspan(m);
    auto b0 = b.first(m);
    auto b1 = b.subspan(m);
    std::vector<Elem> z0 = karatsuba_equal(a0, b0, ctx);
    std::vector<Elem> z2 = karatsuba_equal(a1, b1, ctx);
    std::vector<Elem> sa(a1.begin(), a1.end());
    std::vector<Elem> sb(b1.begin(), b1.end());
    for (std::size_t i = 0; i < m; ++i) {
        sa[i] = ctx.add(sa[i], a0[i]);
        sb[i] = ctx.add(sb[i], b0[i]);
    }
    std::vector<Elem> z1 = karatsuba_equal(sa, sb, ctx);
    for (std::size_t i = 0; i < z0.size(); ++i) {
        z1[i] = ctx.sub(z1[i], z0[i]);
    }
    for (std::size_t i = 0; i < z2.size(); ++i) {
        z1[i] = ctx.sub(z1[i], z2[i]);
    }
    std::vector<Elem> out(2 * n - 1, 0);
    add_into(out, 0, z0, ctx);
    add_into(out, m, std::span<const Elem>(z1).first(std::min(z1.size(), out.size() - m)), ctx);
    add_into(out, 2 * m, z2, ctx);
    return out;
}

} // namespace

std::vector<Elem> karatsuba_mul(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx) {
    if (a.empty() || b.empty()) {
        return {};
    }
    if (a.size() < b.size()) {
        std::swap(a, b);
    }
    // Cut the longer operand into blocks of the shorter one's length.
    const std::size_t s = b.size();
    std::vector<Elem> out(a.size() + s - 1, 0);
    std::vector<Elem> block(s);
    for (std::size_t off = 0; off < a.size(); off += s) {
        std::size_t len = std::min(s, a.size() - off);
        std::fill(block.begin(), block.end(), 0);
        std::copy_n(a.begin() + static_cast<std::ptrdiff_t>(off), len, block.begin());
        std::vector<Elem> part = karatsuba_equal(block, b, ctx);
        std::size_t keep = std::min(part.size(), out.size() - off);
        add_into(out, off, std::span<const Elem>(part).first(keep), ctx);
    }
    return out;
}

std::vector<Elem> mul(std::span<const Elem> a, std::span<const Elem> b, const FieldCtx& ctx) {
    if (a.empty() || b.empty()) {
        return {};
    }
    const std::size_t small = std::min(a.size(), b.size());
    if (small < kKaratsubaThreshold) {
        return schoolbook_mul(a, b, ctx);
    }
    if (small < kNttThreshold || a.size() + b.size() - 1 > kMaxNttLength) {
        return karatsuba_mul(a, b, ctx);
    }
    return ntt_convolve(a, b, ctx);
}

std::vector<Elem> series_inverse(std::span<const Elem> h, std::size_t k, const FieldCtx& ctx) {
    if (h.empty() || h[0] == 0) {
        throw DomainError("series inverse requires a nonzero constant term");
    }
    std::vector<Elem> g{ctx.inv(h[0])};
    std::size_t cur = 1;
    while (cur < k) {
        std::size_t next = std::min(2 * cur, k);
        std::vector<Elem> e = mul(h.first(std::min(next, h.size())), g, ctx);
        e.resize(next, 0);
        for (Elem& x : e) {
            x = ctx.neg(x);
        }
        e[0] = ctx.add(e[0], 2 % ctx.modulus());
        g = mul(g, e, ctx);
        g.resize(next, 0);
        cur = next;
    }
    g.resize(k, 0);
    return g;
}

} // namespace detail

Poly poly_mul(const Poly& f, const Poly& g) {
    require_same_field(f, g);
    return Poly(f.ctx(), detail::mul(f.coeffs(), g.coeffs(), f.ctx()));
}

DivRem poly_divrem(const Poly& f, const Poly& g) {
    require_same_field(f, g);
    if (g.is_zero()) {
        throw DomainError("polynomial division by zero");
    }
    const FieldCtx& ctx = f.ctx();
    if (f.degree() < g.degree()) {
        return {Poly(ctx), f};
    }
    const std::size_t m = static_cast<std::size_t>(g.degree());
    const std::size_t qlen = static_cast<std::size_t>(f.degree()) - m + 1;
    const Elem lead_inv = ctx.inv(g.coeffs().back());

    std::vector<Elem> q(qlen, 0);
    if (m < detail::kKaratsubaThreshold || qlen < detail::kKaratsubaThreshold) {
        std::vector<Elem> r(f.coeffs().begin(), f.coeffs().end());
        for (std::size_t k = qlen; k-- > 0;) {
            Elem c = ctx.mul(r[k + m], lead_inv);
            q[k] = c;
            if (c == 0) {
                continue;
            }
            for (std::size_t i = 0; i <= m; ++i) {
                r[k + i] = ctx.sub(r[k + i], ctx.mul(c, g.coeffs()[i]));
            }
        }
        r.resize(m);
        return {Poly(ctx, std::move(q)), Poly(ctx, std::move(r))};
    }
    // rev(q) = rev(f) / rev(g) mod X^qlen.
    std::vector<Elem> frev(f.coeffs().rbegin(), f.coeffs().rend());
    std::vector<Elem> grev(g.coeffs().rbegin(), g.coeffs().rend());
    frev.resize(qlen);
    std::vector<Elem> ginv = detail::series_inverse(grev, qlen, ctx);
    q = detail::mul(frev, ginv, ctx);
    q.resize(qlen);
    std::reverse(q.begin(), q.end());
    std::vector<Elem> qg = detail::mul(q, g.coeffs(), ctx);
    std::vector<Elem> r(m);
    for (std::size_t i = 0; i < m; ++i) {
        r[i] = ctx.sub(f.coeffs()[i], qg[i]);
    }
    return {Poly(ctx, std::move(q)), Poly(ctx, std::move(r))};
}

Elem horner_eval(const Poly& f, Elem x) {
    return detail::horner(f.coeffs(), x % f.ctx().modulus(), f.ctx());
}

std::vector<Elem> multipoint_eval(const Poly& f, std::span<const Elem> points) {
    if (points.size() < detail::kTreeThreshold || f.degree() < static_cast<std::ptrdiff_t>(detail::kTreeThreshold)) {
        std::vector<Elem> out(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            out[i] = horner_eval(f, points[i]);
        }
        return out;
    }
    MultipointEvaluator ev(f.ctx(), {points.begin(), points.end()});
    return ev.evaluate(f);
}

MultipointEvaluator::MultipointEvaluator(const FieldCtx& ctx, std::vector<Elem> points)
    : ctx_(ctx), points_(std::move(points)) {
    for (Elem& x : points_) {
        x %= ctx_.modulus();
    }
    if (points_.size() >= detail::kTreeThreshold) {
        nodes_.reserve(4 * (points_.size() / detail::kLeafSize + 1));
        root_ = build(0, points_.size(), points_.size());
    }
}

int MultipointEvaluator::build(std::size_t begin, std::size_t end, std::size_t parent_size) {
    Node node;
    node.begin = begin;
    node.end = end;
    const std::size_t size = end - begin;
    if (size <= detail::kLeafSize) {
        node.modulus = {1};
        for (std::size_t i = begin; i < end; ++i) {
            // multiply by (X - x_i)
            const Elem root = ctx_.neg(points_[i]);
            node.modulus.push_back(0);
            for (std::size_t k = node.modulus.size() - 1; k > 0; --k) {
                node.modulus[k] = ctx_.add(node.modulus[k - 1], ctx_.mul(node.modulus[k], root));
            }
            node.modulus[0] = ctx_.mul(node.modulus[0], root);
        }
    } else {
        const std::size_t mid = begin + size / 2;
        int l = build(begin, mid, size);
        int r = build(mid, end, size);
        node.left = l;
        node.right = r;
        node.modulus = detail::mul(nodes_[static_cast<std::size_t>(l)].modulus,
                                   nodes_[static_cast<std::size_t>(r)].modulus, ctx_);
    }
    if (parent_size > size) {
        std::vector<Elem> rev(node.modulus.rbegin(), node.modulus.rend());
        node.inv_rev = detail::series_inverse(rev, parent_size - size, ctx_);
    }
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size() - 1);
}

void MultipointEvaluator::descend(int index, std::vector<Elem> rem, std::span<Elem> out) const {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    if (node.left < 0) {
        detail::horner_batch(rem, std::span<const Elem>(points_).subspan(node.begin, node.end - node.begin),
                             out.subspan(node.begin, node.end - node.begin), ctx_);
        return;
    }
    for (int child : {node.left, node.right}) {
        const Node& c = nodes_[static_cast<std::size_t>(child)];
        descend(child, remainder_with_inverse(rem, c.modulus, c.inv_rev, ctx_), out);
    }
}

void MultipointEvaluator::evaluate_into(std::span<const Elem> coeffs, std::span<Elem> out) const {
    if (out.size() != points_.size()) {
        throw UsageError("output span does not match the number of points");
    }
    std::size_t len = coeffs.size();
    while (len > 0 && coeffs[len - 1] == 0) {
        --len;
    }
    coeffs = coeffs.first(len);
    if (root_ < 0 || len < detail::kTreeThreshold) {
        detail::horner_batch(coeffs, points_, out, ctx_);
        return;
    }
    const Node& root = nodes_[static_cast<std::size_t>(root_)];
    std::vector<Elem> rem;
    if (len > points_.size()) {
        DivRem dr = poly_divrem(Poly(ctx_, {coeffs.begin(), coeffs.end()}), Poly(ctx_, root.modulus));
        rem.assign(dr.remainder.coeffs().begin(), dr.remainder.coeffs().end());
    } else {
        rem.assign(coeffs.begin(), coeffs.end());
    }
    descend(root_, std::move(rem), out);
}

std::vector<Elem> MultipointEvaluator::evaluate(std::span<const Elem> coeffs) const {
    std::vector<Elem> out(points_.size());
    evaluate_into(coeffs, out);
    return out;
}

std::vector<Elem> MultipointEvaluator::evaluate(const Poly& f) const {
    if (f.ctx().modulus() != ctx_.modulus()) {
        throw UsageError("polynomial and evaluator belong to different fields");
    }
    return evaluate(f.coeffs());
}

} // namespace mmv

namespace mmv {

GeometricEvaluator::GeometricEvaluator(const FieldCtx& ctx, Elem start, Elem ratio, std::size_t count,
                                       std::size_t max_len)
    : ctx_(ctx), max_len_(max_len) {
    start %= ctx_.modulus();
    ratio %= ctx_.modulus();
    points_ = ctx_.geometric(ratio, count, start);
    if (ratio == 0 || count < detail::kChirpThreshold || max_len < detail::kChirpThreshold) {
        return;
    }
    const Elem ratio_inv = ctx_.inv(ratio);
    const std::size_t kernel_len = max_len + count - 1;

    // kernel[k] = ratio^C(k,2); C(k+1,2) = C(k,2) + k.
    std::vector<Elem> kernel(kernel_len);
    Elem cur = 1;
    Elem step = 1;
    for (std::size_t k = 0; k < kernel_len; ++k) {
        kernel[k] = cur;
        cur = ctx_.mul(cur, step);
        step = ctx_.mul(step, ratio);
    }
    pre_.resize(max_len);
    cur = 1;
    step = 1;
    Elem start_pow = 1;
    for (std::size_t i = 0; i < max_len; ++i) {
        pre_[i] = ctx_.mul(start_pow, cur);
        cur = ctx_.mul(cur, step);
        step = ctx_.mul(step, ratio_inv);
        start_pow = ctx_.mul(start_pow, start);
    }
    post_.resize(count);
    cur = 1;
    step = 1;
    for (std::size_t u = 0; u < count; ++u) {
        post_[u] = cur;
        cur = ctx_.mul(cur, step);
        step = ctx_.mul(step, ratio_inv);
    }
    conv_ = std::make_unique<detail::FixedKernelConvolver>(kernel, max_len, ctx_);
}

GeometricEvaluator::~GeometricEvaluator() = default;
GeometricEvaluator::GeometricEvaluator(GeometricEvaluator&&) noexcept = default;
GeometricEvaluator& GeometricEvaluator::operator=(GeometricEvaluator&&) noexcept = default;

void GeometricEvaluator::evaluate_into(std::span<const Elem> coeffs, std::span<Elem> out) const {
    if (out.size() != points_.size()) {
        throw UsageError("output span does not match the number of points");
    }
    if (coeffs.size() > max_len_) {
        throw UsageError("polynomial longer than the evaluator was sized for");
    }
    std::size_t len = coeffs.size();
    while (len > 0 && coeffs[len - 1] == 0) {
        --len;
    }
    if (!conv_ || len < detail::kChirpThreshold) {
        detail::horner_batch(coeffs.first(len), points_, out, ctx_);
        return;
    }
    // Reversed, pre-scaled input padded to max_len so the kernel alignment
    // does not depend on the degree.
    std::vector<Elem> rev(max_len_, 0);
    for (std::size_t i = 0; i < len; ++i) {
        rev[max_len_ - 1 - i] = ctx_.mul(coeffs[i], pre_[i]);
    }
    conv_->convolve_range(rev, max_len_ - 1, out);
    for (std::size_t u = 0; u < out.size(); ++u) {
        out[u] = ctx_.mul(out[u], post_[u]);
    }
}

std::vector<Elem> GeometricEvaluator::evaluate(std::span<const Elem> coeffs) const {
    std::vector<Elem> out(points_.size());
    evaluate_into(coeffs, out);
    return out;
}

} // namespace mmv
