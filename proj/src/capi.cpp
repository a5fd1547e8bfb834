#include "mmv/mmv.h"

#include "mmv/correct.hpp"
#include "mmv/detect.hpp"
#include "mmv/errors.hpp"
#include "mmv/generate.hpp"
#include "mmv/matrix.hpp"
#include "mmv/random.hpp"
#include "mmv/reductions.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <new>
#include <sstream>
#include <string>

struct mmv_matrix {
    mmv::DenseIntMatrix m;
};

namespace {

thread_local std::string g_last_error;

mmv_status status_of(mmv::ErrorKind kind) noexcept {
    switch (kind) {
    case mmv::ErrorKind::usage:
        return MMV_ERR_USAGE;
    case mmv::ErrorKind::parse:
        return MMV_ERR_PARSE;
    case mmv::ErrorKind::domain:
        return MMV_ERR_DOMAIN;
    case mmv::ErrorKind::resource:
        return MMV_ERR_RESOURCE;
    case mmv::ErrorKind::promise:
        return MMV_ERR_PROMISE;
    case mmv::ErrorKind::validation:
        return MMV_ERR_VALIDATION;
    case mmv::ErrorKind::internal:
        return MMV_ERR_INTERNAL;
    }
    return MMV_ERR_INTERNAL;
}

mmv_status fail(mmv_status s, const std::string& what) {
    g_last_error = what;
    return s;
}

template <class F>
mmv_status guarded(F&& f) noexcept {
    try {
        f();
        return MMV_OK;
    } catch (const mmv::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(MMV_ERR_RESOURCE, "out of memory");
    } catch (const std::exception& e) {
        return fail(MMV_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MMV_ERR_INTERNAL, "unknown exception");
    }
}

void require(bool cond, const char* what) {
    if (!cond) {
        throw mmv::UsageError(what);
    }
}

mmv_matrix* wrap(mmv::DenseIntMatrix m) { return new mmv_matrix{std::move(m)}; }

void fill(mmv_correct_report* r, const mmv::CorrectionReport& rep) {
    if (!r) {
        return;
    }
    r->corrections = rep.stats.corrections;
    r->iterations = rep.stats.iterations;
    r->evaluations = rep.stats.evaluations;
    r->max_tau = rep.stats.max_tau;
    r->primes_total = rep.primes_total;
    r->engine_runs = rep.engine_runs;
    r->t_used = rep.t_used;
}

mmv_status run_correction(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c_in, size_t t,
                          mmv_trace_fn trace, void* user, mmv_matrix** out, mmv_correct_report* report) {
    if (report) {
        *report = mmv_correct_report{};
    }
    return guarded([&] {
        require(a && b && out, "null argument");
        mmv::CorrectOptions opts;
        if (trace) {
            opts.trace = [trace, user](const mmv::TraceRecord& rec) { trace(mmv::format_trace(rec).c_str(), user); };
        }
        try {
            mmv::CorrectionReport rep =
                c_in ? mmv::mm_correct(a->m, b->m, c_in->m, t, opts) : mmv::os_mm(a->m, b->m, t, opts);
            fill(report, rep);
            *out = wrap(std::move(rep.c));
        } catch (const mmv::PromiseViolation& e) {
            if (report) {
                report->violation_count = e.count();
                report->violation_has_position = e.has_position() ? 1 : 0;
                report->violation_row = e.row();
                report->violation_col = e.col();
                report->t_used = t;
            }
            throw;
        }
    });
}

void write_to(const char* path, const std::function<void(std::ostream&)>& emit) {
    if (std::string(path) == "-") {
        emit(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream os(path);
    if (!os) {
        throw mmv::UsageError(std::string("cannot write ") + path);
    }
    emit(os);
    if (!os) {
        throw mmv::ResourceError(std::string("write failed: ") + path);
    }
}

constexpr std::uint64_t kFlawedModulus = 2147483647ULL;  // 2^31 - 1, primitive root 7

} // namespace

extern "C" {

const char* mmv_last_error(void) { return g_last_error.c_str(); }

const char* mmv_status_name(mmv_status s) {
    switch (s) {
    case MMV_OK:
        return "ok";
    case MMV_ERR_USAGE:
        return "usage";
    case MMV_ERR_PARSE:
        return "parse";
    case MMV_ERR_DOMAIN:
        return "domain";
    case MMV_ERR_RESOURCE:
        return "resource";
    case MMV_ERR_PROMISE:
        return "promise";
    case MMV_ERR_VALIDATION:
        return "validation";
    case MMV_ERR_INTERNAL:
        return "internal";
    }
    return "unknown";
}

mmv_status mmv_matrix_create(size_t rows, size_t cols, mmv_matrix** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = wrap(mmv::DenseIntMatrix(rows, cols));
    });
}

mmv_status mmv_matrix_identity(size_t n, mmv_matrix** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = wrap(mmv::DenseIntMatrix::identity(n));
    });
}

mmv_status mmv_matrix_clone(const mmv_matrix* m, mmv_matrix** out) {
    return guarded([&] {
        require(m && out, "null argument");
        *out = wrap(m->m);
    });
}

void mmv_matrix_free(mmv_matrix* m) { delete m; }

mmv_status mmv_matrix_read(const char* path, mmv_matrix** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = wrap(std::string(path) == "-" ? mmv::read_matrix(std::cin) : mmv::read_matrix(std::string(path)));
    });
}

mmv_status mmv_matrix_parse(const char* text, mmv_matrix** out) {
    return guarded([&] {
        require(text && out, "null argument");
        std::istringstream is(text);
        *out = wrap(mmv::read_matrix(is));
    });
}

mmv_status mmv_matrix_write(const mmv_matrix* m, const char* path) {
    return guarded([&] {
        require(m && path, "null argument");
        write_to(path, [&](std::ostream& os) { mmv::write_matrix(os, m->m); });
    });
}

size_t mmv_matrix_rows(const mmv_matrix* m) { return m ? m->m.rows() : 0; }
size_t mmv_matrix_cols(const mmv_matrix* m) { return m ? m->m.cols() : 0; }

mmv_status mmv_matrix_get(const mmv_matrix* m, size_t i, size_t j, int64_t* out) {
    return guarded([&] {
        require(m && out, "null argument");
        require(i < m->m.rows() && j < m->m.cols(), "index out of range");
        *out = m->m.at(i, j);
    });
}

mmv_status mmv_matrix_set(mmv_matrix* m, size_t i, size_t j, int64_t value) {
    return guarded([&] {
        require(m, "null argument");
        require(i < m->m.rows() && j < m->m.cols(), "index out of range");
        m->m.set(i, j, value);
    });
}

mmv_status mmv_matrix_multiply(const mmv_matrix* a, const mmv_matrix* b, mmv_matrix** out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        *out = wrap(mmv::naive_multiply(a->m, b->m));
    });
}

mmv_status mmv_matrix_count_differences(const mmv_matrix* x, const mmv_matrix* y, size_t* out) {
    return guarded([&] {
        require(x && y && out, "null argument");
        *out = x->m.count_differences(y->m);
    });
}

mmv_status mmv_generate(size_t n, size_t z, uint64_t seed, size_t b_columns, mmv_matrix** a, mmv_matrix** b,
                        mmv_matrix** c) {
    return guarded([&] {
        require(a && b && c, "null argument");
        mmv::GenerateOptions opts;
        opts.b_columns = b_columns;
        mmv::GeneratedInstance inst = mmv::generate_instance(n, z, seed, opts);
        *a = wrap(std::move(inst.a));
        *b = wrap(std::move(inst.b));
        *c = wrap(std::move(inst.c));
    });
}

void mmv_verify_options_init(mmv_verify_options* opts) {
    if (opts) {
        *opts = mmv_verify_options{MMV_MODE_DET, 1, 20, 0, 100};
    }
}

mmv_status mmv_flawed_probe(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c, const uint64_t* points,
                            size_t count, uint64_t modulus, uint64_t* values) {
    return guarded([&] {
        require(a && b && c && (count == 0 || (points && values)), "null argument");
        const mmv::FieldCtx ctx = modulus == 0 ? mmv::FieldCtx(kFlawedModulus, 7, 1)
                                               : mmv::FieldCtx(modulus, 1 % modulus, 1);
        std::vector<mmv::Elem> pts(count);
        for (size_t u = 0; u < count; ++u) {
            pts[u] = points[u] % ctx.modulus();
        }
        const auto vals = mmv::flawed_bilinear_test(a->m, b->m, c->m, pts, ctx);
        std::copy(vals.begin(), vals.end(), values);
    });
}

mmv_status mmv_verify(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c, const mmv_verify_options* opts,
                      mmv_verify_report* report) {
    return guarded([&] {
        require(a && b && c && opts && report, "null argument");
        *report = mmv_verify_report{};
        if (opts->mode == MMV_MODE_FLAWED) {
            require(opts->probes >= 1, "probes must be at least 1");
            const mmv::FieldCtx ctx(kFlawedModulus, 7, 1);
            std::vector<mmv::Elem> pts(opts->probes);
            for (size_t u = 0; u < pts.size(); ++u) {
                pts[u] = u + 1;
            }
            const auto vals = mmv::flawed_bilinear_test(a->m, b->m, c->m, pts, ctx);
            report->flawed_modulus = ctx.modulus();
            for (size_t u = 0; u < vals.size(); ++u) {
                if (vals[u] != 0) {
                    if (report->flawed_nonzero++ == 0) {
                        report->flawed_first_nonzero = u + 1;
                    }
                }
            }
            report->equal = report->flawed_nonzero == 0;
            return;
        }
        mmv::VerifyOutcome out;
        switch (opts->mode) {
        case MMV_MODE_DET:
            out = mmv::mm_verify_t(a->m, b->m, c->m, opts->t);
            break;
        case MMV_MODE_FREIVALDS:
            out = mmv::freivalds_verify(a->m, b->m, c->m, opts->reps, opts->seed);
            break;
        case MMV_MODE_SAMPLING:
            out = mmv::sampling_verify(a->m, b->m, c->m, opts->seed);
            break;
        default:
            throw mmv::UsageError("unknown verification mode");
        }
        report->equal = out.verdict == mmv::Verdict::equal;
        report->primes_total = out.primes_total;
        report->primes_tested = out.primes_tested;
        report->t_used = out.t_used;
        report->evaluations = out.evaluations;
        if (out.witness_prime) {
            report->has_witness = 1;
            report->witness_prime = *out.witness_prime;
            report->witness_nu = out.witness_nu.value_or(0);
        }
        if (out.witness_entry) {
            report->has_entry = 1;
            report->entry_row = out.witness_entry->first;
            report->entry_col = out.witness_entry->second;
        }
    });
}

mmv_status mmv_correct(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c_in, size_t t,
                       mmv_trace_fn trace, void* user, mmv_matrix** out, mmv_correct_report* report) {
    if (!c_in) {
        return fail(MMV_ERR_USAGE, "null argument");
    }
    return run_correction(a, b, c_in, t, trace, user, out, report);
}

mmv_status mmv_osmm(const mmv_matrix* a, const mmv_matrix* b, size_t t, mmv_trace_fn trace, void* user,
                    mmv_matrix** out, mmv_correct_report* report) {
    return run_correction(a, b, nullptr, t, trace, user, out, report);
}

mmv_status mmv_reduce_3sum(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c, const char* out_path,
                           int check, mmv_3sum_report* report) {
    return guarded([&] {
        require(a && b && c && report, "null argument");
        *report = mmv_3sum_report{};
        const mmv::OnesCertificate cert = mmv::bmm_ones_certificate(a->m, b->m, c->m);
        const mmv::ThreeSumInstance inst = mmv::bmm_zeroes_to_3sum(a->m, b->m, c->m);
        report->certificate_ok = cert.ok();
        if (cert.failure) {
            report->failure_row = cert.failure->first;
            report->failure_col = cert.failure->second;
        }
        report->witnesses = cert.witnesses.size();
        report->w = inst.w;
        report->s1_size = inst.s1.size();
        report->s2_size = inst.s2.size();
        report->s3_size = inst.s3.size();
        if (out_path) {
            write_to(out_path, [&](std::ostream& os) { mmv::write_three_sum(os, inst); });
        }
        if (check) {
            report->checked = 1;
            if (const auto hit = mmv::three_sum_find(inst.s1, inst.s2, inst.s3)) {
                report->solvable = 1;
                const auto pos = inst.zero_map.at((*hit)[2]);
                report->wrong_row = pos.first;
                report->wrong_col = pos.second;
            }
        }
    });
}

mmv_status mmv_reduce_upit(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c, const char* out_path,
                           int check, size_t probes, uint64_t seed, mmv_upit_report* report) {
    return guarded([&] {
        require(a && b && report, "null argument");
        *report = mmv_upit_report{};
        mmv::DenseIntMatrix ap = a->m;
        mmv::DenseIntMatrix bp = b->m;
        mmv::u128 bound = 0;
        if (c) {
            const mmv::AugmentedPair pair(a->m, b->m, c->m);
            ap = pair.materialize_a();
            bp = pair.materialize_b();
            bound = pair.magnitude_bound();
        } else {
            require(a->m.cols() == b->m.rows() && b->m.cols() == a->m.rows(), "upit needs A l x m and B m x l");
            bound = static_cast<mmv::u128>(a->m.cols()) * a->m.max_abs() * b->m.max_abs();
        }
        const std::size_t ell = ap.rows();
        const std::size_t inner = ap.cols();
        const mmv::CrtBasis basis = mmv::build_crt_basis(ell, bound);
        const mmv::FieldCtx& ctx = basis.fields.front();
        const mmv::CircuitDesc circ = mmv::emit_upit_circuit(ap, bp, ctx);
        report->modulus = ctx.modulus();
        report->gates = circ.gates.size();
        report->wires = circ.wire_count;
        report->wire_limit = 8 * ell * inner + 64 * std::max(ell, inner);
        report->degree = circ.degree;
        if (out_path) {
            write_to(out_path, [&](std::ostream& os) { mmv::write_circuit(os, circ); });
        }
        if (!check) {
            return;
        }
        report->checked = 1;
        report->probes = probes;
        mmv::SplitRng rng(seed, 7);
        std::vector<mmv::Elem> pts(probes);
        for (auto& x : pts) {
            x = rng.below(ctx.modulus());
        }
        const auto direct = mmv::eval_g_batch(mmv::build_gpoly(ap, bp, ctx, 0, 0, ell), pts);
        for (size_t u = 0; u < probes; ++u) {
            report->mismatches += mmv::eval_circuit(circ, pts[u], ctx) != direct[u];
        }
        // Identity over F_p by evaluation at degree + 1 distinct points.
        const std::uint64_t work = static_cast<std::uint64_t>(circ.gates.size()) * (circ.degree + 1);
        if (work <= 200'000'000ULL && circ.degree < ctx.modulus()) {
            report->identity_decided = 1;
            report->is_zero = 1;
            for (std::size_t x = 0; x <= circ.degree; ++x) {
                if (mmv::eval_circuit(circ, x, ctx) != 0) {
                    report->is_zero = 0;
                    break;
                }
            }
        }
    });
}

} // extern "C"
