#pragma once

// Output-sensitive multiplication and error correction: finds the nonzero
// entries of A'B' one at a time by descending the canonical submatrix tree,
// keeping per-submatrix test values g^{I,J}(omega^nu) up to date after every
// write to C.

#include "mmv/detect.hpp"
#include "mmv/field.hpp"
#include "mmv/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mmv {

/// Sorted (nu, gamma) pairs with gamma != 0; absent nu below the stored
/// prefix means gamma = 0.
using SparseValues = std::vector<std::pair<std::uint32_t, Elem>>;

/// Per visited submatrix: its granularity tau, the prefix alpha for which
/// the four children's test values are stored, and those values.
struct TestValueCache {
    std::size_t tau = 0;
    std::size_t alpha = 0;
    std::array<SparseValues, 4> child_values;
};

struct TraceRecord {
    std::size_t iteration = 0;  // 1-based
    SubmatrixId start;       // innermost member of L at the loop head
    std::size_t tau = 0;     // its granularity after the search
    std::size_t depth = 0;   // levels descended
    std::size_t nu = 0;      // witness index of the last descent step
    std::size_t row = 0;
    std::size_t col = 0;
    i128 value = 0;          // value written to C
};

/// One-line key=value rendering of a trace record.
std::string format_trace(const TraceRecord& r);

struct EngineStats {
    std::size_t corrections = 0;
    std::size_t iterations = 0;
    std::uint64_t evaluations = 0;
    std::size_t max_tau = 0;
};

class CorrectionEngine;

/// Hooks for audits; all default to no-ops.
class EngineObserver {
public:
    virtual ~EngineObserver() = default;
    virtual void on_loop_head(const CorrectionEngine&) {}
    virtual void before_update(const CorrectionEngine&, std::size_t /*row*/, std::size_t /*col*/) {}
    virtual void after_update(const CorrectionEngine&, std::size_t /*row*/, std::size_t /*col*/) {}
    virtual void on_finish(const CorrectionEngine&) {}
};

/// Single-prime engine over square power-of-two n x n inputs. C is
/// modified in place. writes_before counts corrections made by earlier
/// runs against the same budget t.
class CorrectionEngine {
public:
    CorrectionEngine(const DenseIntMatrix& a, const DenseIntMatrix& b, DenseIntMatrix& c, std::size_t t,
                     const FieldCtx& ctx, std::size_t writes_before = 0);

    void set_observer(EngineObserver* obs) noexcept { observer_ = obs; }
    void set_trace(std::function<void(const TraceRecord&)> trace) { trace_ = std::move(trace); }

    /// Runs the main loop until L is empty.
    void run();

    const FieldCtx& ctx() const noexcept { return ctx_; }
    const AugmentedPair& pair() const noexcept { return pair_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t t() const noexcept { return t_; }
    const EngineStats& stats() const noexcept { return stats_; }
    std::size_t total_writes() const noexcept { return writes_before_ + stats_.corrections; }
    const std::vector<std::pair<std::size_t, std::size_t>>& positions() const noexcept { return positions_; }

    const std::vector<SubmatrixId>& queue() const noexcept { return queue_; }
    const SparseValues& root_values() const noexcept { return root_values_; }
    const std::unordered_map<SubmatrixId, TestValueCache, SubmatrixIdHash>& caches() const noexcept {
        return caches_;
    }

    /// From-scratch g^{I,J}(omega^nu) for nu < count (audit oracle).
    std::vector<Elem> recompute(const SubmatrixId& s, std::size_t count) const;

    /// The stored values of s and their prefix length, if any are stored.
    /// The root's values live outside the cache map; others in the parent's.
    std::pair<const SparseValues*, std::size_t> stored_values(const SubmatrixId& s) const;

private:
    std::pair<std::size_t, std::size_t> find_nonzero(TraceRecord& rec);
    void fill_child_values(const SubmatrixId& node, TestValueCache& cache);
    void write_entry(std::size_t i, std::size_t j, TraceRecord& rec);
    void update_values_and_list(std::size_t i, std::size_t j, Elem delta);
    void apply_delta(SparseValues& values, std::size_t prefix, Elem delta, std::size_t exponent);
    void remove_from_queue(const SubmatrixId& s);
    SparseValues compute_values(const SubmatrixId& s, std::size_t lo, std::size_t hi);

    DenseIntMatrix& c_;
    AugmentedPair pair_;
    FieldCtx ctx_;
    std::size_t n_;
    std::size_t t_;
    std::size_t writes_before_;
    SparseValues root_values_;
    std::vector<SubmatrixId> queue_;
    std::unordered_map<SubmatrixId, TestValueCache, SubmatrixIdHash> caches_;
    std::vector<std::pair<std::size_t, std::size_t>> positions_;
    EngineStats stats_;
    EngineObserver* observer_ = nullptr;
    std::function<void(const TraceRecord&)> trace_;
};

struct CorrectOptions {
    EngineObserver* observer = nullptr;
    std::function<void(const TraceRecord&)> trace;
};

struct CorrectionReport {
    DenseIntMatrix c;
    EngineStats stats;
    std::size_t primes_total = 0;
    std::size_t engine_runs = 0;
    std::size_t t_used = 0;
    std::vector<std::pair<std::size_t, std::size_t>> positions;  // in write order
};

/// Returns AB given C_in differing from AB in at most t entries. Square
/// inputs of any size (padded internally). PromiseViolation when more than
/// t corrections would be needed.
CorrectionReport mm_correct(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c_in,
                            std::size_t t, const CorrectOptions& opts = {});

/// AB given that it has at most t nonzero entries.
CorrectionReport os_mm(const DenseIntMatrix& a, const DenseIntMatrix& b, std::size_t t,
                       const CorrectOptions& opts = {});

} // namespace mmv
