// End-to-end tests of the command-line tool. The binary path comes from the
// ALAME_BIN environment variable (set by ctest).

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("ALAME_BIN");
    REQUIRE(b != nullptr);
    return b;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string outfile = (fs::temp_directory_path() / "alame_cli_out.txt").string();
    const std::string cmd = env + (env.empty() ? "" : " ") + bin() + " " + args + " > " +
                            outfile + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream is(outfile);
    std::stringstream ss;
    ss << is.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path tmpdir() {
    auto d = fs::temp_directory_path() / "alame_cli_test";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("edges: (3,1) closed forms include the worked-example values") {
    auto r = run("edges --m 3 --ell 1 --k2 0.95");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("4.7999109") != std::string::npos);
    CHECK(r.out.find(",4.7999999999999998") != std::string::npos);
    CHECK(r.out.find(",9.5499999999999989") != std::string::npos);
    CHECK(r.out.find("first_finite_gap=(4.7999999999999998,9.5499999999999989)") !=
          std::string::npos);
}

TEST_CASE("edges: Lame m=1 discriminant scan matches the closed forms") {
    auto r = run("edges --m 1 --ell 0 --k2 0.5");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("method=discriminant-scan") != std::string::npos);
    CHECK(r.out.find("0,0.5000") != std::string::npos);
    CHECK(r.out.find("1,1.0000") != std::string::npos);
    CHECK(r.out.find("2,1.5000") != std::string::npos);
}

TEST_CASE("exit codes: domain errors are 2") {
    CHECK(run("edges --m 3 --ell 1 --k2 1.5").exit_code == 2);
    CHECK(run("solve --m 3 --ell 1 --k2 0.95 --energy 4.8").exit_code == 2);
    CHECK(run("partner --m 3 --ell 1 --k2 0.95 --order 2 --epsilon1 9.4 --epsilon2 9.4")
              .exit_code == 2);
    CHECK(run("partner --m 3 --ell 1 --k2 0.95 --order 1 --epsilon1 4.75 --lambda1 -1")
              .exit_code == 2);
    // order-1 factorization energy must lie strictly below E0
    CHECK(run("partner --m 3 --ell 1 --k2 0.95 --order 1 --epsilon1 4.9").exit_code == 2);
    CHECK(run("verify --suite nosuch").exit_code == 2);
}

TEST_CASE("solve: writes CSV with a verification block and is byte-deterministic") {
    auto d = tmpdir();
    const auto f1 = d / "s1.csv", f2 = d / "s2.csv";
    auto r1 = run("solve --m 3 --ell 1 --k2 0.95 --energy 4.75 --samples 401 --output " +
               f1.string());
    CHECK(r1.exit_code == 0);
    CHECK(r1.out.find("max_residual_rel") != std::string::npos);
    auto r2 = run("solve --m 3 --ell 1 --k2 0.95 --energy 4.75 --samples 401 --output " +
               f2.string());
    CHECK(r2.exit_code == 0);
    const std::string c1 = slurp(f1), c2 = slurp(f2);
    CHECK(c1 == c2);
    CHECK(c1.find("x,V,psi_plus_re,psi_plus_im,psi_minus_re,psi_minus_im") !=
          std::string::npos);
    CHECK(c1.find("# max_residual_rel=") != std::string::npos);

    // Lame-limit path
    auto r3 = run("solve --m 1 --ell 0 --k2 0.5 --energy 0.3 --samples 101");
    CHECK(r3.exit_code == 0);
}

TEST_CASE("solve: JSON format has meta + columns") {
    auto d = tmpdir();
    const auto f = d / "s.json";
    auto r = run("solve --m 2 --ell 1 --k2 0.5 --energy 1.2 --samples 51 --format json "
                 "--output " + f.string());
    CHECK(r.exit_code == 0);
    const std::string j = slurp(f);
    CHECK(j.find("\"meta\"") != std::string::npos);
    CHECK(j.find("\"columns\"") != std::string::npos);
    CHECK(j.find("\"psi_plus_re\"") != std::string::npos);
}

TEST_CASE("partner: figure fixtures regenerate byte-identically") {
    auto d = tmpdir();
    const std::string configs[4] = {
        "partner --m 3 --ell 1 --k2 0.95 --order 1 --sign + --epsilon1 4.75 --samples 301",
        "partner --m 3 --ell 1 --k2 0.95 --order 1 --epsilon1 4.75 --lambda1 1 --samples 301",
        "partner --m 3 --ell 1 --k2 0.95 --order 2 --epsilon1 9.4 --epsilon2 9.5 --samples 301",
        "partner --m 3 --ell 1 --k2 0.95 --order 2 --epsilon1 9.4 --epsilon2 9.5 --lambda1 1 "
        "--lambda2 -2 --samples 301",
    };
    for (int i = 0; i < 4; ++i) {
        const auto fa = d / ("fig" + std::to_string(i + 1) + "a.csv");
        const auto fb = d / ("fig" + std::to_string(i + 1) + "b.csv");
        CHECK(run(configs[i] + " --output " + fa.string()).exit_code == 0);
        CHECK(run(configs[i] + " --output " + fb.string()).exit_code == 0);
        CHECK(slurp(fa) == slurp(fb));
        CHECK(slurp(fa).find("x,V,V_partner") != std::string::npos);
    }
    // defect configs carry window and bound states in the meta
    const auto f2 = d / "fig2a.csv";
    CHECK(slurp(f2).find("# defect_window_lo=") != std::string::npos);
    CHECK(slurp(f2).find("# bound_states=4.75") != std::string::npos);
    const auto f4 = d / "fig4a.csv";
    CHECK(slurp(f4).find("# bound_states=9.4") != std::string::npos);
}

TEST_CASE("partner: SVG plot output is written and well-formed-ish") {
    auto d = tmpdir();
    const auto svg = d / "fig1.svg";
    auto r = run("partner --m 3 --ell 1 --k2 0.95 --order 1 --sign + --epsilon1 4.75 "
                 "--samples 201 --plot " + svg.string());
    CHECK(r.exit_code == 0);
    const std::string s = slurp(svg);
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("<polyline") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
}

TEST_CASE("no partial output file is left behind on error") {
    auto d = tmpdir();
    const auto f = d / "bad.csv";
    std::error_code ec;
    fs::remove(f, ec);
    // degenerate energy: computation fails before any write
    auto r = run("solve --m 3 --ell 1 --k2 0.95 --energy 4.8 --output " + f.string());
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(f));
    CHECK_FALSE(fs::exists(f.string() + ".tmp"));
}

TEST_CASE("configuration precedence: flags > environment > config file") {
    auto d = tmpdir();
    const auto cfg = d / "alame.cfg";
    {
        std::ofstream os(cfg);
        os << "# config file\nk2=0.25\nenergy=0.10\nsamples=41\n";
    }
    const auto f = d / "prec.csv";

    // config only
    auto r1 = run("solve --m 1 --ell 0 --config " + cfg.string() + " --output " + f.string());
    CHECK(r1.exit_code == 0);
    CHECK(slurp(f).find("# k2=0.25") != std::string::npos);
    CHECK(slurp(f).find("# energy=0.10000000000000001") != std::string::npos);

    // environment overrides config
    auto r2 = run("solve --m 1 --ell 0 --config " + cfg.string() + " --output " + f.string(),
                  "LAME_K2=0.36");
    CHECK(r2.exit_code == 0);
    CHECK(slurp(f).find("# k2=0.35999999999999999") != std::string::npos);
    CHECK(slurp(f).find("# energy=0.10000000000000001") != std::string::npos);

    // flag overrides both
    auto r3 = run("solve --m 1 --ell 0 --k2 0.49 --config " + cfg.string() + " --output " +
                      f.string(),
                  "LAME_K2=0.36");
    CHECK(r3.exit_code == 0);
    CHECK(slurp(f).find("# k2=0.48999999999999999") != std::string::npos);
}

TEST_CASE("verify: suites pass and report to JSON") {
    auto d = tmpdir();
    const auto rep = d / "verify.json";
    auto r = run("verify --suite frobenius --output " + rep.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("[PASS]") != std::string::npos);
    CHECK(slurp(rep).find("\"all_pass\": true") != std::string::npos);
}
