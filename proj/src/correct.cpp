#include "mmv/correct.hpp"

#include "mmv/errors.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

namespace mmv {

std::string format_trace(const TraceRecord& r) {
    std::ostringstream os;
    os << "iter=" << r.iteration << " rows=" << r.start.i_start + 1 << "-" << r.start.i_start + r.start.side
       << " cols=" << r.start.j_start + 1 << "-" << r.start.j_start + r.start.side << " tau=" << r.tau
       << " depth=" << r.depth << " nu=" << r.nu << " row=" << r.row + 1 << " col=" << r.col + 1
       << " value=" << to_decimal(r.value);
    return os.str();
}

CorrectionEngine::CorrectionEngine(const DenseIntMatrix& a, const DenseIntMatrix& b, DenseIntMatrix& c,
                                   std::size_t t, const FieldCtx& ctx, std::size_t writes_before)
    : c_(c), pair_(a, b, c), ctx_(ctx), n_(a.rows()), t_(t), writes_before_(writes_before) {
    if (!a.is_square() || a.rows() != b.rows() || !std::has_single_bit(n_)) {
        throw UsageError("engine needs square inputs of power-of-two dimension");
    }
    if (t == 0) {
        throw UsageError("t must be at least 1");
    }
    if (ctx.order_lb() < n_ * n_) {
        throw DomainError("root of unity order does not cover n^2");
    }
    t_ = std::min(t, n_ * n_);
}

SparseValues CorrectionEngine::compute_values(const SubmatrixId& s, std::size_t lo, std::size_t hi) {
    SparseValues out;
    if (hi <= lo) {
        return out;
    }
    const GPolyRep rep = build_gpoly(pair_, ctx_, s);
    const auto vals = eval_g_geometric(rep, ctx_.pow(ctx_.omega(), lo), ctx_.omega(), hi - lo, &stats_.evaluations);
    for (std::size_t u = 0; u < vals.size(); ++u) {
        if (vals[u] != 0) {
            out.emplace_back(static_cast<std::uint32_t>(lo + u), vals[u]);
        }
    }
    return out;
}

std::vector<Elem> CorrectionEngine::recompute(const SubmatrixId& s, std::size_t count) const {
    if (count == 0) {
        return {};
    }
    return eval_g_geometric(build_gpoly(pair_, ctx_, s), 1, ctx_.omega(), count);
}

std::pair<const SparseValues*, std::size_t> CorrectionEngine::stored_values(const SubmatrixId& s) const {
    if (s == SubmatrixId::root(n_)) {
        return {&root_values_, t_};
    }
    const std::size_t ps = 2 * s.side;
    const SubmatrixId parent{s.i_start - s.i_start % ps, s.j_start - s.j_start % ps, ps};
    const auto it = caches_.find(parent);
    if (it == caches_.end()) {
        return {nullptr, 0};
    }
    return {&it->second.child_values[parent.child_index(s.i_start, s.j_start)], it->second.alpha};
}

void CorrectionEngine::fill_child_values(const SubmatrixId& node, TestValueCache& cache) {
    if (cache.alpha >= cache.tau) {
        return;
    }
    const auto children = node.split();
    for (std::size_t c = 0; c < 4; ++c) {
        SparseValues fresh = compute_values(children[c], cache.alpha, cache.tau);
        auto& dst = cache.child_values[c];
        dst.insert(dst.end(), fresh.begin(), fresh.end());
    }
    cache.alpha = cache.tau;
}

std::pair<std::size_t, std::size_t> CorrectionEngine::find_nonzero(TraceRecord& rec) {
    SubmatrixId node = queue_.back();
    rec.start = node;
    for (;;) {
        if (node.is_leaf()) {
            return {node.i_start, node.j_start};
        }
        TestValueCache& cache = caches_[node];
        if (cache.tau == 0) {
            cache.tau = node.side;
        }
        for (;;) {
            fill_child_values(node, cache);
            stats_.max_tau = std::max(stats_.max_tau, cache.tau);
            std::size_t best = 4;
            std::uint32_t best_nu = 0;
            for (std::size_t c = 0; c < 4; ++c) {
                const auto& vals = cache.child_values[c];
                if (!vals.empty() && (best == 4 || vals.front().first < best_nu)) {
                    best = c;
                    best_nu = vals.front().first;
                }
            }
            if (best < 4) {
                if (rec.depth == 0) {
                    rec.tau = cache.tau;
                }
                rec.nu = best_nu;
                ++rec.depth;
                node = node.child(best);
                queue_.push_back(node);
                break;
            }
            const std::size_t half = node.side / 2;
            if (cache.tau >= half * half) {
                throw InternalError("submatrix " + to_string(node) +
                                    " is on the queue but no child test value is nonzero");
            }
            cache.tau *= 2;
        }
    }
}

void CorrectionEngine::apply_delta(SparseValues& values, std::size_t prefix, Elem delta, std::size_t exponent) {
    if (prefix == 0) {
        return;
    }
    // gamma_nu += (q - q_old)(omega^nu) * r(omega^(nu side)) = -delta * omega^(nu e)
    const Elem step = ctx_.pow(ctx_.omega(), exponent);
    Elem cur = ctx_.neg(delta);
    SparseValues next;
    next.reserve(prefix);
    auto it = values.begin();
    for (std::size_t nu = 0; nu < prefix; ++nu) {
        Elem v = cur;
        if (it != values.end() && it->first == nu) {
            v = ctx_.add(v, it->second);
            ++it;
        }
        if (v != 0) {
            next.emplace_back(static_cast<std::uint32_t>(nu), v);
        }
        cur = ctx_.mul(cur, step);
    }
    stats_.evaluations += prefix;
    values.swap(next);
}

void CorrectionEngine::remove_from_queue(const SubmatrixId& s) {
    const auto it = std::find(queue_.begin(), queue_.end(), s);
    if (it != queue_.end()) {
        queue_.erase(it);
    }
}

void CorrectionEngine::update_values_and_list(std::size_t i, std::size_t j, Elem delta) {
    SubmatrixId node = SubmatrixId::root(n_);
    SparseValues* values = &root_values_;
    std::size_t prefix = t_;
    for (;;) {
        const std::size_t e = (i - node.i_start) + node.side * (j - node.j_start);
        apply_delta(*values, prefix, delta, e);
        if (values->empty()) {
            remove_from_queue(node);
        }
        if (node.is_leaf()) {
            break;
        }
        // Unvisited submatrices have no stored child values, nor do any of
        // their descendants.
        const auto it = caches_.find(node);
        if (it == caches_.end()) {
            break;
        }
        const std::size_t c = node.child_index(i, j);
        values = &it->second.child_values[c];
        prefix = it->second.alpha;
        node = node.child(c);
    }
}

void CorrectionEngine::write_entry(std::size_t i, std::size_t j, TraceRecord& rec) {
    const i128 value = pair_.inner_product(i, j);
    const std::int64_t old = c_.at(i, j);
    if (value == old) {
        throw InternalError("test values point at an entry that is already correct");
    }
    if (total_writes() >= t_) {
        throw PromiseViolation(i, j, total_writes() + 1);
    }
    if (value > std::numeric_limits<std::int64_t>::max() || value < std::numeric_limits<std::int64_t>::min()) {
        throw ResourceError("product entry does not fit in 64 bits");
    }
    rec.row = i;
    rec.col = j;
    rec.value = value;
    if (observer_) {
        observer_->before_update(*this, i, j);
    }
    c_.set(i, j, static_cast<std::int64_t>(value));
    positions_.emplace_back(i, j);
    ++stats_.corrections;
    update_values_and_list(i, j, ctx_.sub(ctx_.from_i128(value), ctx_.from_int(old)));
    if (observer_) {
        observer_->after_update(*this, i, j);
    }
}

void CorrectionEngine::run() {
    const SubmatrixId root = SubmatrixId::root(n_);
    root_values_ = compute_values(root, 0, t_);
    if (!root_values_.empty()) {
        queue_.push_back(root);
    }
    while (!queue_.empty()) {
        if (observer_) {
            observer_->on_loop_head(*this);
        }
        TraceRecord rec;
        rec.iteration = stats_.iterations + 1;
        const auto [i, j] = find_nonzero(rec);
        write_entry(i, j, rec);
        ++stats_.iterations;
        if (trace_) {
            trace_(rec);
        }
    }
    if (observer_) {
        observer_->on_finish(*this);
    }
}

namespace {

u128 sat_mul(u128 a, u128 b) noexcept {
    return a != 0 && b > ~u128{0} / a ? ~u128{0} : a * b;
}

u128 sat_add(u128 a, u128 b) noexcept {
    return a > ~u128{0} - b ? ~u128{0} : a + b;
}

DenseIntMatrix top_left(const DenseIntMatrix& m, std::size_t n) {
    if (m.rows() == n) {
        return m;
    }
    DenseIntMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out.set(i, j, m.at(i, j));
        }
    }
    return out;
}

} // namespace

CorrectionReport mm_correct(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c_in,
                            std::size_t t, const CorrectOptions& opts) {
    if (t == 0) {
        throw UsageError("t must be at least 1");
    }
    PaddedTriple padded = pad_to_pow2(a, b, c_in);
    const std::size_t n = padded.n_padded;
    // C only ever takes values of AB, so this bounds every intermediate A'B'.
    const u128 product = sat_mul(sat_mul(n, a.max_abs()), b.max_abs());
    const CrtBasis basis = build_crt_basis(n, sat_add(product, std::max<u128>(product, c_in.max_abs())));

    CorrectionReport report{c_in, {}, basis.size(), 0, std::min(t, n * n), {}};
    const AugmentedPair pair(padded.a, padded.b, padded.c);
    std::size_t writes = 0;
    for (const FieldCtx& ctx : basis.fields) {
        CorrectionEngine engine(padded.a, padded.b, padded.c, t, ctx, writes);
        engine.set_observer(opts.observer);
        if (opts.trace) {
            engine.set_trace(opts.trace);
        }
        engine.run();
        ++report.engine_runs;
        writes = engine.total_writes();
        const EngineStats& s = engine.stats();
        report.stats.corrections += s.corrections;
        report.stats.iterations += s.iterations;
        report.stats.evaluations += s.evaluations;
        report.stats.max_tau = std::max(report.stats.max_tau, s.max_tau);
        report.positions.insert(report.positions.end(), engine.positions().begin(), engine.positions().end());

        // Integer-level sweep: a difference that vanishes modulo this prime
        // is caught by another one.
        bool clean = true;
        for (const FieldCtx& f : basis.fields) {
            const ZeroTestResult z = all_zeroes_test(build_gpoly(pair, f), t);
            report.stats.evaluations += z.evaluations;
            if (!z.zero) {
                clean = false;
                break;
            }
        }
        if (clean) {
            report.c = top_left(padded.c, a.rows());
            return report;
        }
    }
    throw PromiseViolation(writes + 1);
}

CorrectionReport os_mm(const DenseIntMatrix& a, const DenseIntMatrix& b, std::size_t t, const CorrectOptions& opts) {
    if (!a.is_square()) {
        throw UsageError("os_mm needs square matrices");
    }
    return mm_correct(a, b, DenseIntMatrix(a.rows(), a.rows()), t, opts);
}

} // namespace mmv
