// Command-line front end over the C API.

#include "mmv/mmv.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

enum Exit : int {
    kEqual = 0,
    kNotEqual = 1,
    kPromise = 2,
    kUsage = 64,
    kParse = 65,
    kInternal = 70,
};

struct CliFailure : std::runtime_error {
    CliFailure(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

int exit_code_of(mmv_status s) {
    switch (s) {
    case MMV_OK:
        return kEqual;
    case MMV_ERR_USAGE:
    case MMV_ERR_DOMAIN:
        return kUsage;
    case MMV_ERR_PARSE:
    case MMV_ERR_VALIDATION:
        return kParse;
    case MMV_ERR_PROMISE:
        return kPromise;
    case MMV_ERR_RESOURCE:
    case MMV_ERR_INTERNAL:
        return kInternal;
    }
    return kInternal;
}

void check(mmv_status s, const std::string& context = "") {
    if (s != MMV_OK) {
        throw CliFailure(exit_code_of(s), (context.empty() ? "" : context + ": ") + mmv_last_error());
    }
}

struct MatrixDeleter {
    void operator()(mmv_matrix* m) const noexcept { mmv_matrix_free(m); }
};
using Matrix = std::unique_ptr<mmv_matrix, MatrixDeleter>;

Matrix load(const std::string& path) {
    mmv_matrix* m = nullptr;
    check(mmv_matrix_read(path.c_str(), &m), path);
    return Matrix(m);
}

void store(const mmv_matrix* m, const std::string& path) { check(mmv_matrix_write(m, path.c_str()), path); }

struct Globals {
    std::uint64_t seed = 1;
    std::string trace;
    bool quiet = false;
};

/// key=value lines; goes to stderr when stdout carries a matrix.
class Report {
public:
    Report(const Globals& g, bool to_stderr) : quiet_(g.quiet), os_(to_stderr ? std::cerr : std::cout) {}

    template <class T>
    Report& kv(const std::string& key, const T& value) {
        if (!quiet_) {
            os_ << key << '=' << value << '\n';
        }
        return *this;
    }

    /// Always printed, even under --quiet.
    void verdict(const std::string& v) { os_ << "verdict=" << v << '\n'; }

private:
    bool quiet_;
    std::ostream& os_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string position(size_t i, size_t j) { return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"; }

// ------------------------------------------------------------------ gen

struct GenArgs {
    size_t n = 0;
    size_t z = 0;
    size_t b_columns = 0;
    std::string a = "A.txt", b = "B.txt", c = "C.txt";
};

int run_gen(const Globals& g, const GenArgs& args) {
    mmv_matrix *a = nullptr, *b = nullptr, *c = nullptr;
    check(mmv_generate(args.n, args.z, g.seed, args.b_columns, &a, &b, &c));
    Matrix ma(a), mb(b), mc(c);
    store(a, args.a);
    store(b, args.b);
    store(c, args.c);
    const bool to_stderr = args.a == "-" || args.b == "-" || args.c == "-";
    Report(g, to_stderr)
        .kv("command", "gen")
        .kv("n", args.n)
        .kv("errors", args.z)
        .kv("seed", g.seed)
        .kv("a", args.a)
        .kv("b", args.b)
        .kv("c", args.c);
    return kEqual;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
    std::string a, b, c;
    size_t t = 1;
    std::string mode = "det";
    size_t reps = 20;
    size_t probes = 100;
};

int run_verify(const Globals& g, const VerifyArgs& args) {
    Matrix a = load(args.a), b = load(args.b), c = load(args.c);
    mmv_verify_options opts;
    mmv_verify_options_init(&opts);
    if (args.mode == "det") {
        opts.mode = MMV_MODE_DET;
    } else if (args.mode == "freivalds") {
        opts.mode = MMV_MODE_FREIVALDS;
    } else if (args.mode == "sampling") {
        opts.mode = MMV_MODE_SAMPLING;
    } else {
        opts.mode = MMV_MODE_FLAWED;
    }
    opts.t = args.t;
    opts.reps = args.reps;
    opts.seed = g.seed;
    opts.probes = args.probes;
    mmv_verify_report rep;
    const auto t0 = std::chrono::steady_clock::now();
    check(mmv_verify(a.get(), b.get(), c.get(), &opts, &rep));
    const double secs = seconds_since(t0);

    Report r(g, false);
    r.verdict(rep.equal ? "C=AB" : "C!=AB");
    r.kv("command", "verify").kv("mode", args.mode).kv("n", mmv_matrix_rows(a.get()));
    switch (opts.mode) {
    case MMV_MODE_DET:
    case MMV_MODE_SAMPLING:
        r.kv("t", rep.t_used).kv("primes", rep.primes_total).kv("primes_tested", rep.primes_tested);
        if (rep.has_witness) {
            r.kv("witness_prime", rep.witness_prime).kv("witness_nu", rep.witness_nu);
        }
        if (rep.has_entry) {
            r.kv("witness_entry", position(rep.entry_row, rep.entry_col));
        }
        if (opts.mode == MMV_MODE_SAMPLING) {
            r.kv("seed", g.seed);
        }
        r.kv("evaluations", rep.evaluations);
        break;
    case MMV_MODE_FREIVALDS:
        r.kv("reps", args.reps).kv("seed", g.seed);
        break;
    case MMV_MODE_FLAWED:
        r.kv("modulus", rep.flawed_modulus)
            .kv("probes", args.probes)
            .kv("nonzero_probes", rep.flawed_nonzero)
            .kv("first_nonzero_probe", rep.flawed_first_nonzero);
        break;
    }
    r.kv("wall_s", secs);
    return rep.equal ? kEqual : kNotEqual;
}

// ------------------------------------------------------------------ correct / osmm

struct CorrectArgs {
    std::string a, b, c;
    size_t t = 1;
    std::string out = "-";
};

void trace_to_stream(const char* line, void* user) { *static_cast<std::ostream*>(user) << line << '\n'; }

int run_correct(const Globals& g, const CorrectArgs& args, bool osmm) {
    Matrix a = load(args.a), b = load(args.b);
    Matrix c = osmm ? nullptr : load(args.c);
    std::ofstream trace_file;
    if (!g.trace.empty()) {
        trace_file.open(g.trace);
        if (!trace_file) {
            throw CliFailure(kUsage, "cannot write " + g.trace);
        }
    }
    mmv_trace_fn trace = g.trace.empty() ? nullptr : trace_to_stream;
    void* user = g.trace.empty() ? nullptr : static_cast<std::ostream*>(&trace_file);

    mmv_matrix* out = nullptr;
    mmv_correct_report rep;
    const auto t0 = std::chrono::steady_clock::now();
    const mmv_status s = osmm ? mmv_osmm(a.get(), b.get(), args.t, trace, user, &out, &rep)
                              : mmv_correct(a.get(), b.get(), c.get(), args.t, trace, user, &out, &rep);
    const double secs = seconds_since(t0);
    Report r(g, args.out == "-");
    if (s == MMV_ERR_PROMISE) {
        r.kv("command", osmm ? "osmm" : "correct").kv("t", rep.t_used).kv("status", "promise_violation");
        r.kv("attempted_corrections", rep.violation_count);
        if (rep.violation_has_position) {
            r.kv("position", position(rep.violation_row, rep.violation_col));
        }
        std::cerr << "error: " << mmv_last_error() << '\n';
        return kPromise;
    }
    check(s);
    Matrix result(out);
    store(result.get(), args.out);
    r.kv("command", osmm ? "osmm" : "correct")
        .kv("n", mmv_matrix_rows(a.get()))
        .kv("t", rep.t_used)
        .kv("status", "ok")
        .kv("corrections", rep.corrections)
        .kv("max_tau", rep.max_tau)
        .kv("evaluations", rep.evaluations)
        .kv("primes", rep.primes_total)
        .kv("engine_runs", rep.engine_runs)
        .kv("output", args.out)
        .kv("wall_s", secs);
    return kEqual;
}

// ------------------------------------------------------------------ reduce

struct ReduceArgs {
    std::string to;
    std::vector<std::string> inputs;
    std::string out = "-";
    bool check = false;
    size_t probes = 50;
};

int run_reduce(const Globals& g, const ReduceArgs& args) {
    Report r(g, args.out == "-");
    r.kv("command", "reduce").kv("to", args.to);
    if (args.to == "3sum") {
        if (args.inputs.size() != 3) {
            throw CliFailure(kUsage, "reduce --to 3sum needs A B C");
        }
        Matrix a = load(args.inputs[0]), b = load(args.inputs[1]), c = load(args.inputs[2]);
        mmv_3sum_report rep;
        check(mmv_reduce_3sum(a.get(), b.get(), c.get(), args.out.c_str(), args.check, &rep));
        r.kv("w", rep.w).kv("s1", rep.s1_size).kv("s2", rep.s2_size).kv("s3", rep.s3_size);
        r.kv("witnesses", rep.witnesses);
        if (!rep.certificate_ok) {
            r.kv("certificate", "failed at " + position(rep.failure_row, rep.failure_col));
        } else {
            r.kv("certificate", "ok");
        }
        if (!args.check) {
            return kEqual;
        }
        if (rep.solvable) {
            r.kv("check", "YES instance, C wrong at " + position(rep.wrong_row, rep.wrong_col));
        } else if (rep.certificate_ok) {
            r.kv("check", "NO instance, C verified");
        } else {
            r.kv("check", "NO instance, C wrong at " + position(rep.failure_row, rep.failure_col));
        }
        return rep.certificate_ok && !rep.solvable ? kEqual : kNotEqual;
    }
    if (args.inputs.size() != 2 && args.inputs.size() != 3) {
        throw CliFailure(kUsage, "reduce --to upit needs A B [C]");
    }
    Matrix a = load(args.inputs[0]), b = load(args.inputs[1]);
    Matrix c = args.inputs.size() == 3 ? load(args.inputs[2]) : nullptr;
    mmv_upit_report rep;
    check(mmv_reduce_upit(a.get(), b.get(), c.get(), args.out.c_str(), args.check, args.probes, g.seed, &rep));
    r.kv("modulus", rep.modulus)
        .kv("gates", rep.gates)
        .kv("wires", rep.wires)
        .kv("wire_limit", rep.wire_limit)
        .kv("degree", rep.degree);
    if (!args.check) {
        return kEqual;
    }
    r.kv("probes", rep.probes).kv("seed", g.seed).kv("mismatches", rep.mismatches);
    if (rep.mismatches != 0) {
        throw CliFailure(kInternal, "circuit disagrees with direct evaluation at " + std::to_string(rep.mismatches) +
                                        " probes");
    }
    if (!rep.identity_decided) {
        r.kv("identity", "skipped");
        return kEqual;
    }
    r.kv("identity", rep.is_zero ? "zero" : "nonzero");
    return rep.is_zero ? kEqual : kNotEqual;
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
    std::string suite = "detect";
    std::string n_list = "128,256,512";
    std::string t_rule = "n";
    size_t reps = 3;
    std::string out = "-";
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

size_t parse_size(const std::string& s, const std::string& what) {
    size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty() || s[0] == '-') {
        throw CliFailure(kUsage, "bad " + what + ": '" + s + "'");
    }
    return static_cast<size_t>(v);
}

/// "n", "Kn", "n/K" or a constant K.
size_t apply_t_rule(const std::string& rule, size_t n) {
    const auto slash = rule.find("n/");
    if (rule == "n") {
        return n;
    }
    if (slash == 0) {
        return std::max<size_t>(1, n / std::max<size_t>(1, parse_size(rule.substr(2), "t rule")));
    }
    if (!rule.empty() && rule.back() == 'n') {
        return parse_size(rule.substr(0, rule.size() - 1), "t rule") * n;
    }
    return parse_size(rule, "t rule");
}

struct Sample {
    double wall = 0;
    uint64_t evaluations = 0;
    size_t corrections = 0;
};

Sample bench_once(const std::string& mode, size_t n, size_t t, uint64_t seed) {
    mmv_matrix *a = nullptr, *b = nullptr, *c = nullptr;
    const size_t z = mode == "correct" ? std::min(t, n * n) : 0;
    check(mmv_generate(n, z, seed, 0, &a, &b, &c));
    Matrix ma(a), mb(b), mc(c);
    Sample s;
    const auto t0 = std::chrono::steady_clock::now();
    if (mode == "detect") {
        mmv_verify_options opts;
        mmv_verify_options_init(&opts);
        opts.t = t;
        mmv_verify_report rep;
        check(mmv_verify(a, b, c, &opts, &rep));
        s.wall = seconds_since(t0);
        s.evaluations = rep.evaluations;
    } else if (mode == "correct") {
        mmv_matrix* out = nullptr;
        mmv_correct_report rep;
        check(mmv_correct(a, b, c, t, nullptr, nullptr, &out, &rep));
        s.wall = seconds_since(t0);
        mmv_matrix_free(out);
        s.evaluations = rep.evaluations;
        s.corrections = rep.corrections;
    } else {
        mmv_matrix* out = nullptr;
        check(mmv_matrix_multiply(a, b, &out));
        s.wall = seconds_since(t0);
        mmv_matrix_free(out);
    }
    return s;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2;
}

int run_bench(const Globals& g, const BenchArgs& args) {
    const auto modes = split_list(args.suite);
    for (const auto& m : modes) {
        if (m != "detect" && m != "correct" && m != "naive") {
            throw CliFailure(kUsage, "unknown suite '" + m + "'");
        }
    }
    if (modes.empty() || args.reps == 0) {
        throw CliFailure(kUsage, "bench needs a suite and reps >= 1");
    }
    std::ofstream file;
    if (args.out != "-") {
        file.open(args.out);
        if (!file) {
            throw CliFailure(kUsage, "cannot write " + args.out);
        }
    }
    std::ostream& os = args.out == "-" ? std::cout : file;
    os << "n,t,mode,kind,wall_s,evaluations,corrections\n";
    for (const auto& item : split_list(args.n_list)) {
        const size_t n = parse_size(item, "n");
        const size_t t = apply_t_rule(args.t_rule, n);
        std::vector<double> medians(modes.size());
        for (size_t mi = 0; mi < modes.size(); ++mi) {
            std::vector<double> walls;
            Sample last;
            for (size_t rep = 0; rep < args.reps; ++rep) {
                last = bench_once(modes[mi], n, t, g.seed + rep);
                walls.push_back(last.wall);
                os << n << ',' << t << ',' << modes[mi] << ",raw," << last.wall << ',' << last.evaluations << ','
                   << last.corrections << '\n';
            }
            medians[mi] = median(walls);
            os << n << ',' << t << ',' << modes[mi] << ",median," << medians[mi] << ',' << last.evaluations << ','
               << last.corrections << '\n';
        }
        const auto det = std::find(modes.begin(), modes.end(), "detect");
        const auto nai = std::find(modes.begin(), modes.end(), "naive");
        if (det != modes.end() && nai != modes.end()) {
            const double ratio = medians[nai - modes.begin()] / medians[det - modes.begin()];
            os << n << ',' << t << ",naive/detect,ratio," << ratio << ",,\n";
        }
    }
    return kEqual;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic matrix product verification, correction and output-sensitive multiplication"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "seed for every randomized step (recorded in reports)");
    app.add_option("--trace", g.trace, "write one line per correction to this file");
    app.add_flag("--quiet", g.quiet, "print only the verdict line");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "random instance with planted errors");
    gen_cmd->add_option("-n,--n", gen.n, "dimension")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("-z,--errors", gen.z, "number of wrong entries in C");
    gen_cmd->add_option("--b-columns", gen.b_columns, "keep only this many nonzero columns of B");
    gen_cmd->add_option("--out-a", gen.a, "path for A");
    gen_cmd->add_option("--out-b", gen.b, "path for B");
    gen_cmd->add_option("--out-c", gen.c, "path for C");

    VerifyArgs ver;
    auto* ver_cmd = app.add_subcommand("verify", "decide C = AB; exit 0 if equal, 1 if not");
    ver_cmd->add_option("A", ver.a)->required();
    ver_cmd->add_option("B", ver.b)->required();
    ver_cmd->add_option("C", ver.c)->required();
    ver_cmd->add_option("-t,--t", ver.t, "error budget (det)")->check(CLI::PositiveNumber);
    ver_cmd->add_option("--mode", ver.mode)->check(CLI::IsMember({"det", "freivalds", "sampling", "flawed"}));
    ver_cmd->add_option("--reps", ver.reps, "Freivalds rounds")->check(CLI::PositiveNumber);
    ver_cmd->add_option("--probes", ver.probes, "flawed-mode probe points 1..P")->check(CLI::PositiveNumber);

    CorrectArgs cor;
    auto* cor_cmd = app.add_subcommand("correct", "AB from C with at most t wrong entries");
    cor_cmd->add_option("A", cor.a)->required();
    cor_cmd->add_option("B", cor.b)->required();
    cor_cmd->add_option("C", cor.c)->required();
    cor_cmd->add_option("-t,--t", cor.t)->required()->check(CLI::PositiveNumber);
    cor_cmd->add_option("-o,--out", cor.out, "output matrix path ('-' for stdout)");

    CorrectArgs os;
    auto* os_cmd = app.add_subcommand("osmm", "AB given at most t nonzero entries");
    os_cmd->add_option("A", os.a)->required();
    os_cmd->add_option("B", os.b)->required();
    os_cmd->add_option("-t,--t", os.t)->required()->check(CLI::PositiveNumber);
    os_cmd->add_option("-o,--out", os.out, "output matrix path ('-' for stdout)");

    ReduceArgs red;
    auto* red_cmd = app.add_subcommand("reduce", "export a 3SUM instance or a UPIT circuit");
    red_cmd->add_option("--to", red.to)->required()->check(CLI::IsMember({"3sum", "upit"}));
    red_cmd->add_option("inputs", red.inputs, "A B C (3sum) or A B [C] (upit)")->required();
    red_cmd->add_option("-o,--out", red.out, "output path ('-' for stdout)");
    red_cmd->add_flag("--check", red.check, "run the brute-force oracle");
    red_cmd->add_option("--probes", red.probes, "upit fidelity probes");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "timing CSV");
    bench_cmd->add_option("--suite", bench.suite, "detect|correct|naive, comma separated");
    bench_cmd->add_option("--n", bench.n_list, "comma separated dimensions");
    bench_cmd->add_option("--t-rule", bench.t_rule, "t as n, Kn, n/K or a constant");
    bench_cmd->add_option("--reps", bench.reps)->check(CLI::PositiveNumber);
    bench_cmd->add_option("-o,--out", bench.out, "CSV path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gen_cmd) {
            return run_gen(g, gen);
        }
        if (*ver_cmd) {
            return run_verify(g, ver);
        }
        if (*cor_cmd) {
            return run_correct(g, cor, false);
        }
        if (*os_cmd) {
            return run_correct(g, os, true);
        }
        if (*red_cmd) {
            return run_reduce(g, red);
        }
        return run_bench(g, bench);
    } catch (const CliFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
}
