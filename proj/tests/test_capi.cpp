// Exercises the exported C interface only.

#include "mmv/mmv.h"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct Handle {
    mmv_matrix* m = nullptr;
    ~Handle() { mmv_matrix_free(m); }
    mmv_matrix** out() { return &m; }
};

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / (std::string("mmv_capi_") + name)).string();
}

void collect(const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); }

} // namespace

TEST_SUITE("capi") {

TEST_CASE("status names and error messages") {
    CHECK(std::string(mmv_status_name(MMV_OK)) == "ok");
    CHECK(std::string(mmv_status_name(MMV_ERR_PROMISE)) == "promise");
    Handle m;
    CHECK(mmv_matrix_create(0, 3, m.out()) == MMV_ERR_USAGE);
    CHECK(m.m == nullptr);
    CHECK(std::strlen(mmv_last_error()) > 0);
    CHECK(mmv_matrix_read("/nonexistent/file.txt", m.out()) == MMV_ERR_USAGE);
}

TEST_CASE("matrix handles") {
    Handle a;
    REQUIRE(mmv_matrix_parse("# two by two\n2 2\n1 2\n3 4\n", a.out()) == MMV_OK);
    CHECK(mmv_matrix_rows(a.m) == 2);
    CHECK(mmv_matrix_cols(a.m) == 2);
    std::int64_t v = 0;
    CHECK(mmv_matrix_get(a.m, 1, 0, &v) == MMV_OK);
    CHECK(v == 3);
    CHECK(mmv_matrix_get(a.m, 2, 0, &v) == MMV_ERR_USAGE);

    Handle b, prod;
    REQUIRE(mmv_matrix_parse("2 2\n5 6\n7 8\n", b.out()) == MMV_OK);
    REQUIRE(mmv_matrix_multiply(a.m, b.m, prod.out()) == MMV_OK);
    Handle want;
    REQUIRE(mmv_matrix_parse("2 2\n19 22\n43 50\n", want.out()) == MMV_OK);
    std::size_t d = 99;
    CHECK(mmv_matrix_count_differences(prod.m, want.m, &d) == MMV_OK);
    CHECK(d == 0);

    Handle bad;
    CHECK(mmv_matrix_parse("2 2\n1 0\n0\n", bad.out()) == MMV_ERR_PARSE);
    CHECK(std::string(mmv_last_error()).find("line 3") != std::string::npos);

    const std::string path = temp_path("rt.txt");
    CHECK(mmv_matrix_write(prod.m, path.c_str()) == MMV_OK);
    Handle back;
    REQUIRE(mmv_matrix_read(path.c_str(), back.out()) == MMV_OK);
    CHECK(mmv_matrix_count_differences(back.m, want.m, &d) == MMV_OK);
    CHECK(d == 0);
    std::remove(path.c_str());

    Handle c;
    REQUIRE(mmv_matrix_clone(a.m, c.out()) == MMV_OK);
    CHECK(mmv_matrix_set(c.m, 0, 0, 7) == MMV_OK);
    CHECK(mmv_matrix_count_differences(a.m, c.m, &d) == MMV_OK);
    CHECK(d == 1);
}

TEST_CASE("generate and verify in every mode") {
    Handle a, b, c;
    REQUIRE(mmv_generate(8, 1, 3, 0, a.out(), b.out(), c.out()) == MMV_OK);
    mmv_verify_options opts;
    mmv_verify_options_init(&opts);
    CHECK(opts.mode == MMV_MODE_DET);
    CHECK(opts.t == 1);
    mmv_verify_report rep;
    REQUIRE(mmv_verify(a.m, b.m, c.m, &opts, &rep) == MMV_OK);
    CHECK(rep.equal == 0);
    CHECK(rep.has_witness == 1);
    CHECK(rep.primes_total >= 1);

    Handle e, f, g;
    REQUIRE(mmv_generate(8, 0, 3, 0, e.out(), f.out(), g.out()) == MMV_OK);
    for (mmv_verify_mode mode : {MMV_MODE_DET, MMV_MODE_FREIVALDS, MMV_MODE_SAMPLING, MMV_MODE_FLAWED}) {
        opts.mode = mode;
        REQUIRE(mmv_verify(e.m, f.m, g.m, &opts, &rep) == MMV_OK);
        CHECK(rep.equal == 1);
    }
    opts.mode = MMV_MODE_DET;
    opts.t = 0;
    CHECK(mmv_verify(e.m, f.m, g.m, &opts, &rep) == MMV_ERR_USAGE);
    CHECK(mmv_generate(2, 5, 1, 0, a.out(), b.out(), c.out()) == MMV_ERR_USAGE);
}

TEST_CASE("flawed probe misses the cancelling instance") {
    Handle d, i2, z;
    REQUIRE(mmv_matrix_parse("2 2\n0 1\n-1 0\n", d.out()) == MMV_OK);
    REQUIRE(mmv_matrix_identity(2, i2.out()) == MMV_OK);
    REQUIRE(mmv_matrix_create(2, 2, z.out()) == MMV_OK);
    std::vector<std::uint64_t> pts(100), vals(100, 1);
    for (std::size_t u = 0; u < pts.size(); ++u) {
        pts[u] = u + 1;
    }
    REQUIRE(mmv_flawed_probe(d.m, i2.m, z.m, pts.data(), pts.size(), 0, vals.data()) == MMV_OK);
    CHECK(std::count(vals.begin(), vals.end(), 0u) == 100);

    mmv_verify_options opts;
    mmv_verify_options_init(&opts);
    mmv_verify_report rep;
    opts.mode = MMV_MODE_FLAWED;
    REQUIRE(mmv_verify(d.m, i2.m, z.m, &opts, &rep) == MMV_OK);
    CHECK(rep.equal == 1);
    CHECK(rep.flawed_nonzero == 0);
    CHECK(rep.flawed_modulus == 2147483647u);
    opts.mode = MMV_MODE_DET;
    opts.t = 2;
    REQUIRE(mmv_verify(d.m, i2.m, z.m, &opts, &rep) == MMV_OK);
    CHECK(rep.equal == 0);
}

TEST_CASE("correction and promise violations") {
    Handle a, b, c, out;
    REQUIRE(mmv_generate(8, 5, 1, 0, a.out(), b.out(), c.out()) == MMV_OK);
    mmv_correct_report rep;
    std::vector<std::string> lines;
    REQUIRE(mmv_correct(a.m, b.m, c.m, 5, collect, &lines, out.out(), &rep) == MMV_OK);
    CHECK(rep.corrections == 5);
    CHECK(lines.size() == 5);
    CHECK(lines[0].rfind("iter=1 ", 0) == 0);
    Handle prod;
    REQUIRE(mmv_matrix_multiply(a.m, b.m, prod.out()) == MMV_OK);
    std::size_t d = 1;
    CHECK(mmv_matrix_count_differences(out.m, prod.m, &d) == MMV_OK);
    CHECK(d == 0);

    Handle none;
    CHECK(mmv_correct(a.m, b.m, c.m, 4, nullptr, nullptr, none.out(), &rep) == MMV_ERR_PROMISE);
    CHECK(none.m == nullptr);
    CHECK(rep.violation_count == 5);

    Handle z, zo;
    REQUIRE(mmv_matrix_create(4, 4, z.out()) == MMV_OK);
    REQUIRE(mmv_osmm(z.m, z.m, 1, nullptr, nullptr, zo.out(), &rep) == MMV_OK);
    CHECK(rep.corrections == 0);
    CHECK(mmv_matrix_count_differences(zo.m, z.m, &d) == MMV_OK);
    CHECK(d == 0);
}

TEST_CASE("reductions through the C interface") {
    Handle one, zero;
    REQUIRE(mmv_matrix_parse("1 1\n1\n", one.out()) == MMV_OK);
    REQUIRE(mmv_matrix_parse("1 1\n0\n", zero.out()) == MMV_OK);
    const std::string path = temp_path("3sum.txt");
    mmv_3sum_report r3;
    REQUIRE(mmv_reduce_3sum(one.m, one.m, zero.m, path.c_str(), 1, &r3) == MMV_OK);
    CHECK(r3.w == 4);
    CHECK(r3.checked == 1);
    CHECK(r3.solvable == 1);
    CHECK(r3.certificate_ok == 1);
    std::ifstream in(path);
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    CHECK(l1 == "17");
    CHECK(l2 == "3");
    CHECK(l3 == "20");
    std::remove(path.c_str());

    Handle two;
    REQUIRE(mmv_matrix_parse("1 1\n2\n", two.out()) == MMV_OK);
    CHECK(mmv_reduce_3sum(two.m, one.m, zero.m, nullptr, 0, &r3) == MMV_ERR_USAGE);

    Handle a, b, c;
    REQUIRE(mmv_generate(6, 0, 2, 0, a.out(), b.out(), c.out()) == MMV_OK);
    mmv_upit_report ru;
    REQUIRE(mmv_reduce_upit(a.m, b.m, c.m, nullptr, 1, 50, 1, &ru) == MMV_OK);
    CHECK(ru.mismatches == 0);
    CHECK(ru.probes == 50);
    CHECK(ru.wires <= ru.wire_limit);
    CHECK(ru.identity_decided == 1);
    CHECK(ru.is_zero == 1);
    REQUIRE(mmv_reduce_upit(a.m, b.m, nullptr, nullptr, 1, 50, 1, &ru) == MMV_OK);
    CHECK(ru.mismatches == 0);
}

} // TEST_SUITE
