// Runs the mmv executable as a subprocess and checks exit codes and output.

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef MMV_CLI_PATH
#error "MMV_CLI_PATH must point at the mmv executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

const fs::path& workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "mmv_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string p(const std::string& name) { return (workdir() / name).string(); }

// stderr is folded into the captured output when merge is set.
Result run(const std::string& args, bool merge = false) {
    const std::string cmd = std::string("\"") + MMV_CLI_PATH + "\" " + args + (merge ? " 2>&1" : " 2>/dev/null");
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string gen(std::size_t n, std::size_t z, std::uint64_t seed, const std::string& tag) {
    const std::string args = "--seed " + std::to_string(seed) + " gen -n " + std::to_string(n) + " -z " +
                             std::to_string(z) + " --out-a " + p(tag + "A") + " --out-b " + p(tag + "B") +
                             " --out-c " + p(tag + "C");
    REQUIRE(run(args).code == 0);
    return p(tag + "A") + " " + p(tag + "B") + " " + p(tag + "C");
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) {
        out.push_back(l);
    }
    return out;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 64") {
    CHECK(run("").code == 64);
    CHECK(run("frobnicate").code == 64);
    CHECK(run("gen -n 2 -z 5 --out-a " + p("u1") + " --out-b " + p("u2") + " --out-c " + p("u3")).code == 64);
    CHECK(run("verify " + p("missing1") + " " + p("missing2") + " " + p("missing3")).code == 64);
    CHECK(run("verify --mode bogus a b c").code == 64);
}

TEST_CASE("parse errors exit 65") {
    write_file(p("bad.txt"), "2 2\n1 0\n0\n");
    write_file(p("ok.txt"), "2 2\n1 0\n0 1\n");
    const Result r = run("verify " + p("bad.txt") + " " + p("ok.txt") + " " + p("ok.txt"), true);
    CHECK(r.code == 65);
    CHECK(r.out.find("line 3") != std::string::npos);
}

TEST_CASE("verify examples") {
    const std::string exact = gen(8, 0, 5, "e");
    const Result r = run("verify " + exact + " -t 1");
    CHECK(r.code == 0);
    CHECK(r.out.find("verdict=C=AB\n") != std::string::npos);
    const std::string one = gen(8, 1, 5, "o");
    const Result s = run("verify " + one + " -t 1");
    CHECK(s.code == 1);
    CHECK(s.out.find("verdict=C!=AB\n") != std::string::npos);
    const Result q = run("--quiet verify " + one + " -t 1");
    CHECK(q.out == "verdict=C!=AB\n");
    for (const char* mode : {"freivalds", "sampling", "flawed"}) {
        CHECK(run("verify --mode " + std::string(mode) + " " + exact).code == 0);
    }
}

TEST_CASE("flawed mode misses the cancelling instance, det does not") {
    write_file(p("D.txt"), "2 2\n0 1\n-1 0\n");
    write_file(p("I.txt"), "2 2\n1 0\n0 1\n");
    write_file(p("Z.txt"), "2 2\n0 0\n0 0\n");
    const std::string files = p("D.txt") + " " + p("I.txt") + " " + p("Z.txt");
    const Result flawed = run("verify --mode flawed --probes 100 " + files);
    CHECK(flawed.code == 0);
    CHECK(flawed.out.find("nonzero_probes=0\n") != std::string::npos);
    CHECK(flawed.out.find("probes=100\n") != std::string::npos);
    CHECK(run("verify -t 2 " + files).code == 1);
}

TEST_CASE("gen then verify round trip over 100 seeds") {
    std::size_t bad = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::size_t n = 2 + seed % 7;
        const std::size_t z = seed % 4;
        const std::string files = gen(n, z, seed, "rt");
        const int code = run("verify -t " + std::to_string(std::max<std::size_t>(z, 1)) + " " + files).code;
        bad += code != (z == 0 ? 0 : 1);
    }
    CHECK(bad == 0);
}

TEST_CASE("correct, promise violation and osmm") {
    const std::string files = gen(8, 5, 1, "c");
    const Result r = run("correct " + files + " -t 5 -o " + p("fixed.txt"));
    CHECK(r.code == 0);
    CHECK(r.out.find("corrections=5\n") != std::string::npos);
    const Result check = run("verify -t 64 " + p("cA") + " " + p("cB") + " " + p("fixed.txt"));
    CHECK(check.code == 0);
    const Result v = run("correct " + files + " -t 4 -o " + p("never.txt"));
    CHECK(v.code == 2);
    CHECK(v.out.find("attempted_corrections=5") != std::string::npos);

    CHECK(run("osmm " + p("Z.txt") + " " + p("Z.txt") + " -t 1 -o " + p("zz.txt")).code == 0);
    CHECK(read_file(p("zz.txt")) == "2 2\n0 0\n0 0\n");
    const Result to_stdout = run("osmm " + p("I.txt") + " " + p("I.txt") + " -t 2");
    CHECK(to_stdout.out == "2 2\n1 0\n0 1\n");

    const std::string trace = p("trace.txt");
    CHECK(run("--trace " + trace + " correct " + files + " -t 5 -o " + p("fixed2.txt")).code == 0);
    CHECK(lines_of(read_file(trace)).size() == 5);
}

TEST_CASE("reduce examples") {
    write_file(p("one.txt"), "1 1\n1\n");
    write_file(p("zero.txt"), "1 1\n0\n");
    const Result r = run("reduce --to 3sum " + p("one.txt") + " " + p("one.txt") + " " + p("zero.txt") + " -o " +
                         p("inst.txt") + " --check");
    CHECK(r.code == 1);
    CHECK(lines_of(read_file(p("inst.txt"))) == std::vector<std::string>{"17", "3", "20"});
    CHECK(r.out.find("check=YES instance, C wrong at (1,1)") != std::string::npos);

    const Result ok = run("reduce --to 3sum " + p("I.txt") + " " + p("I.txt") + " " + p("I.txt") + " -o " +
                          p("inst2.txt") + " --check");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("check=NO instance, C verified") != std::string::npos);
    CHECK(run("reduce --to 3sum " + p("D.txt") + " " + p("I.txt") + " " + p("Z.txt") + " -o " + p("x.txt")).code ==
          64);

    CHECK(run("reduce --to upit " + p("Z.txt") + " " + p("Z.txt") + " -o " + p("circ.txt")).code == 0);
    const auto circ = lines_of(read_file(p("circ.txt")));
    REQUIRE(circ.size() >= 2);
    CHECK(circ.back() == "OUTPUT g1");
    CHECK(circ[circ.size() - 2] == "g1 = CONST 0");
    const Result u = run("reduce --to upit " + p("I.txt") + " " + p("I.txt") + " -o " + p("circ2.txt") + " --check");
    CHECK(u.code == 1);  // g of I2 * I2 is not the zero polynomial
    CHECK(u.out.find("mismatches=0") != std::string::npos);
}

TEST_CASE("bench row counts") {
    const Result r = run("bench --suite detect --n 16,32 --reps 3 -o -");
    CHECK(r.code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(!rows.empty());
    CHECK(rows[0] == "n,t,mode,kind,wall_s,evaluations,corrections");
    std::size_t raw = 0, median = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        raw += rows[i].find(",raw,") != std::string::npos;
        median += rows[i].find(",median,") != std::string::npos;
    }
    CHECK(raw == 6);
    CHECK(median == 2);
    const Result both = run("bench --suite detect,naive --n 32 --reps 1 -o -");
    CHECK(both.out.find("naive/detect") != std::string::npos);
}

} // TEST_SUITE
