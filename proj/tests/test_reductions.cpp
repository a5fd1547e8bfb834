#include "oracles.hpp"

#include "mmv/detect.hpp"
#include "mmv/errors.hpp"
#include "mmv/reductions.hpp"

#include <doctest.h>

#include <map>
#include <sstream>
#include <tuple>

using namespace mmv;

namespace {

DenseIntMatrix random_bool(SplitRng& rng, std::size_t n, unsigned density_pct) {
    DenseIntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m.set(i, j, rng.below(100) < density_pct ? 1 : 0);
        }
    }
    return m;
}

DenseIntMatrix from_bits(std::size_t n, std::uint64_t bits) {
    DenseIntMatrix m(n, n);
    for (std::size_t q = 0; q < n * n; ++q) {
        m.set(q / n, q % n, (bits >> q) & 1);
    }
    return m;
}

// The reduction's verdict: certificate for the ones, no 3SUM solution for
// the zeroes.
bool reduction_accepts(const DenseIntMatrix& a, const DenseIntMatrix& b, const DenseIntMatrix& c) {
    if (!bmm_ones_certificate(a, b, c).ok()) {
        return false;
    }
    const auto inst = bmm_zeroes_to_3sum(a, b, c);
    return !three_sum_bruteforce(inst.s1, inst.s2, inst.s3);
}

std::vector<Elem> probe_points(SplitRng& rng, std::size_t count, std::uint64_t p) {
    std::vector<Elem> xs(count);
    for (auto& x : xs) {
        x = rng.below(p);
    }
    return xs;
}

} // namespace

TEST_SUITE("reductions") {

TEST_CASE("ones certificate examples") {
    const auto i2 = DenseIntMatrix::identity(2);
    const auto cert = bmm_ones_certificate(i2, i2, i2);
    REQUIRE(cert.ok());
    REQUIRE(cert.witnesses.size() == 2);
    CHECK(cert.witnesses[0].row == 0);
    CHECK(cert.witnesses[0].col == 0);
    CHECK(cert.witnesses[0].k == 0);
    CHECK(cert.witnesses[1].k == 1);

    const auto bad = DenseIntMatrix::from_rows({{1, 1}, {0, 1}});
    const auto fail = bmm_ones_certificate(i2, i2, bad);
    REQUIRE(!fail.ok());
    CHECK(*fail.failure == std::make_pair(std::size_t{0}, std::size_t{1}));

    CHECK_THROWS_AS(bmm_ones_certificate(DenseIntMatrix::from_rows({{2}}), DenseIntMatrix::from_rows({{1}}),
                                         DenseIntMatrix::from_rows({{1}})),
                    UsageError);
}

TEST_CASE("certificates on random exact Boolean products") {
    SplitRng rng(3);
    for (int it = 0; it < 30; ++it) {
        const auto a = random_bool(rng, 6, 30);
        const auto b = random_bool(rng, 6, 30);
        const auto c = oracle::bool_product(a, b);
        const auto cert = bmm_ones_certificate(a, b, c);
        REQUIRE(cert.ok());
        std::size_t ones = 0;
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                ones += c.at(i, j);
            }
        }
        CHECK(cert.witnesses.size() == ones);
        for (const auto& w : cert.witnesses) {
            CHECK(a.at(w.row, w.k) == 1);
            CHECK(b.at(w.k, w.col) == 1);
            for (std::size_t k = 0; k < w.k; ++k) {
                CHECK(!(a.at(w.row, k) && b.at(k, w.col)));
            }
        }
    }
}

TEST_CASE("3SUM encoding of the n = 1 example") {
    const auto one = DenseIntMatrix::from_rows({{1}});
    const auto zero = DenseIntMatrix::from_rows({{0}});
    const auto inst = bmm_zeroes_to_3sum(one, one, zero);
    CHECK(inst.w == 4);
    CHECK(inst.s1 == std::vector<std::int64_t>{17});
    CHECK(inst.s2 == std::vector<std::int64_t>{3});
    CHECK(inst.s3 == std::vector<std::int64_t>{20});
    CHECK(three_sum_bruteforce(inst.s1, inst.s2, inst.s3));
    const auto sol = three_sum_find(inst.s1, inst.s2, inst.s3);
    REQUIRE(sol.has_value());
    CHECK(*sol == std::array<std::int64_t, 3>{17, 3, 20});
    CHECK(inst.zero_map.at(20) == std::make_pair(std::size_t{0}, std::size_t{0}));
    std::ostringstream os;
    write_three_sum(os, inst);
    CHECK(os.str() == "17\n3\n20\n");
}

TEST_CASE("3SUM examples") {
    const DenseIntMatrix z(2, 2);
    const auto inst = bmm_zeroes_to_3sum(z, z, z);
    CHECK(inst.s1.empty());
    CHECK(inst.s2.empty());
    CHECK(inst.s3.size() == 4);
    CHECK(!three_sum_bruteforce(inst.s1, inst.s2, inst.s3));
    CHECK(three_sum_bruteforce({1}, {2}, {3}));
    CHECK(!three_sum_bruteforce({1}, {1}, {3}));

    SplitRng rng(8);
    for (int it = 0; it < 20; ++it) {
        const auto a = random_bool(rng, 5, 40);
        const auto b = random_bool(rng, 5, 40);
        const auto r = bmm_zeroes_to_3sum(a, b, oracle::bool_product(a, b));
        CHECK(!three_sum_bruteforce(r.s1, r.s2, r.s3));
    }
}

TEST_CASE("3SUM pair budget") {
    std::vector<std::int64_t> big(4000);
    for (std::size_t i = 0; i < big.size(); ++i) {
        big[i] = static_cast<std::int64_t>(i);
    }
    CHECK_THROWS_AS(three_sum_bruteforce(big, big, {1}), ResourceError);
    CHECK(three_sum_bruteforce(big, big, {7995}, 16'000'000));
    CHECK(!three_sum_bruteforce({1, 2}, {3}, {7}, 2));
    CHECK_THROWS_AS(three_sum_bruteforce({1, 2}, {3}, {7}, 1), ResourceError);
}

TEST_CASE("reduction agrees with the Boolean product, exhaustive n <= 2") {
    for (std::size_t n : {1, 2}) {
        const std::uint64_t count = std::uint64_t{1} << (n * n);
        std::size_t bad = 0;
        for (std::uint64_t x = 0; x < count; ++x) {
            for (std::uint64_t y = 0; y < count; ++y) {
                const auto a = from_bits(n, x), b = from_bits(n, y);
                const auto ab = oracle::bool_product(a, b);
                for (std::uint64_t w = 0; w < count; ++w) {
                    const auto c = from_bits(n, w);
                    bad += reduction_accepts(a, b, c) != (c == ab);
                }
            }
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("reduction agrees with the Boolean product, random n <= 6") {
    SplitRng rng(29);
    std::size_t bad = 0, wrong = 0;
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 1 + rng.below(6);
        const auto a = random_bool(rng, n, 20 + static_cast<unsigned>(rng.below(60)));
        const auto b = random_bool(rng, n, 20 + static_cast<unsigned>(rng.below(60)));
        auto c = oracle::bool_product(a, b);
        const std::size_t flips = rng.below(3);
        for (std::size_t f = 0; f < flips; ++f) {
            const std::size_t i = rng.below(n), j = rng.below(n);
            c.set(i, j, 1 - c.at(i, j));
        }
        const bool equal = c == oracle::bool_product(a, b);
        wrong += !equal;
        bad += reduction_accepts(a, b, c) != equal;
    }
    CHECK(bad == 0);
    CHECK(wrong > 50);
}

TEST_CASE("3SUM encodings are collision-free for n <= 6") {
    for (std::int64_t n = 1; n <= 6; ++n) {
        const std::int64_t w = 2 * (n + 1);
        std::map<std::int64_t, std::tuple<std::int64_t, std::int64_t>> targets;
        for (std::int64_t i = 1; i <= n; ++i) {
            for (std::int64_t j = 1; j <= n; ++j) {
                targets[i * w * w + j * w] = {i, j};
            }
        }
        std::size_t bad = 0;
        for (std::int64_t i = 1; i <= n; ++i) {
            for (std::int64_t k = 1; k <= n; ++k) {
                for (std::int64_t j = 1; j <= n; ++j) {
                    for (std::int64_t k2 = 1; k2 <= n; ++k2) {
                        const auto it = targets.find(i * w * w + k + j * w - k2);
                        if (it == targets.end()) {
                            bad += k == k2;  // a matching pair must hit its target
                            continue;
                        }
                        const auto [ti, tj] = it->second;
                        bad += !(ti == i && tj == j && k == k2);
                    }
                }
            }
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("circuit examples") {
    const FieldCtx f17(17, 3, 16);
    {
        const auto a = DenseIntMatrix::from_rows({{5}});
        const auto b = DenseIntMatrix::from_rows({{7}});
        const auto circ = emit_upit_circuit(a, b, f17);
        for (Elem x : {0u, 1u, 9u}) {
            CHECK(eval_circuit(circ, x, f17) == 35 % 17);
        }
    }
    {
        const auto i2 = DenseIntMatrix::identity(2);
        const auto circ = emit_upit_circuit(i2, i2, f17);
        for (Elem x = 0; x < 17; ++x) {
            CHECK(eval_circuit(circ, x, f17) == (1 + x * x * x) % 17);
        }
        CHECK(eval_circuit(circ, 2, f17) == 9);
        CHECK(circ.degree >= 3);
    }
    {
        const DenseIntMatrix z(3, 3);
        const auto circ = emit_upit_circuit(z, z, f17);
        CHECK(eval_circuit(circ, 4, f17) == 0);
        CHECK(circ.gates[circ.output].op == GateOp::constant);
    }
    {
        CircuitDesc pass;
        pass.modulus = 17;
        pass.gates.push_back(Gate{GateOp::input, 0, 0, 0});
        pass.output = 0;
        CHECK(eval_circuit(pass, 5, f17) == 5);
    }
}

TEST_CASE("malformed circuits are rejected") {
    const FieldCtx f17(17, 3, 16);
    CircuitDesc c;
    c.modulus = 17;
    c.gates.push_back(Gate{GateOp::input, 0, 0, 0});
    c.gates.push_back(Gate{GateOp::add, 0, 0, 2});
    c.gates.push_back(Gate{GateOp::constant, 3, 0, 0});
    c.output = 1;
    CHECK_THROWS_AS(eval_circuit(c, 1, f17), ValidationError);
    c.gates[1].rhs = 0;
    c.output = 9;
    CHECK_THROWS_AS(eval_circuit(c, 1, f17), ValidationError);
    c.output = 1;
    CHECK(eval_circuit(c, 4, f17) == 8);
}

TEST_CASE("circuit fidelity and size on random instances") {
    SplitRng rng(41);
    for (int it = 0; it < 20; ++it) {
        const std::size_t n = 1 + rng.below(16);
        const auto a = oracle::random_matrix(rng, n, n, -9, 9);
        const auto b = oracle::random_matrix(rng, n, n, -9, 9);
        const auto basis = build_crt_basis(n, 2);
        const FieldCtx& f = basis.fields[0];
        const auto circ = emit_upit_circuit(a, b, f);
        const auto xs = probe_points(rng, 50, f.modulus());
        const auto want = eval_g_batch(build_gpoly(a, b, f, 0, 0, n), xs);
        std::size_t bad = 0;
        for (std::size_t u = 0; u < xs.size(); ++u) {
            bad += eval_circuit(circ, xs[u], f) != want[u];
        }
        CHECK(bad == 0);
        CHECK(circ.wire_count <= 8 * n * n + 64 * n);
        CHECK(circ.degree <= 2 * n * n);

        // Independent oracle: Horner on the expanded coefficients of g.
        const auto coeffs = oracle::g_coefficients(a, b, nullptr, f.modulus());
        CHECK(eval_circuit(circ, xs[0], f) == oracle::horner(coeffs, xs[0], f.modulus()));
    }
}

TEST_CASE("circuit text round trip") {
    const FieldCtx f17(17, 3, 16);
    const auto i2 = DenseIntMatrix::identity(2);
    const auto circ = emit_upit_circuit(i2, i2, f17);
    std::stringstream ss;
    write_circuit(ss, circ);
    const std::string text = ss.str();
    CHECK(text.rfind("# modulus 17", 0) == 0);
    CHECK(text.find("g0 = INPUT") != std::string::npos);
    const auto back = read_circuit(ss);
    CHECK(back.modulus == 17);
    CHECK(back.gates.size() == circ.gates.size());
    CHECK(back.output == circ.output);
    for (Elem x = 0; x < 17; ++x) {
        CHECK(eval_circuit(back, x, f17) == eval_circuit(circ, x, f17));
    }
    std::istringstream broken("# modulus 17 gates 2 wires 0 degree 1\ng0 = INPUT\ng1 = FOO g0 g0\nOUTPUT g1\n");
    CHECK_THROWS_AS(read_circuit(broken), ParseError);
}

} // TEST_SUITE
