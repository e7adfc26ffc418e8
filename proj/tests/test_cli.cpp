// Exit-code and file-output contract of the command-line tool, exercised
// through the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
    const fs::path out = fs::temp_directory_path() / "ppacdc_cli_out.txt";
    const std::string cmd = (env.empty() ? "" : env + " ") + std::string(PPACDC_BIN) + " " +
                            args + " > " + out.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "ppacdc_cli_scratch";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("gen-graph writes a ring and reports its diameter") {
    const fs::path out = scratch_dir() / "ring.txt";
    const auto r = run_cli("gen-graph --n 5 --prob 0 --seed 1 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("n=5 m=5 diameter=4") != std::string::npos);
    CHECK(fs::exists(out));

    // same seed, same bytes
    const fs::path out2 = scratch_dir() / "ring2.txt";
    run_cli("gen-graph --n 5 --prob 0 --seed 1 --out " + out2.string());
    std::ifstream a(out), b(out2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("analyze exit codes") {
    CHECK(run_cli("analyze --ring 5 --gamma 0.2").exit_code == 0);
    const auto fail = run_cli("analyze --ring 5 --gamma 10");
    CHECK(fail.exit_code == 2);
    CHECK(fail.stdout_text.find("\"passes\":false") != std::string::npos);
    CHECK(run_cli("analyze --ring 5 --gamma 0").exit_code == 1);

    const auto ok = run_cli("analyze --ring 5 --gamma 0.2");
    CHECK(ok.stdout_text.find("\"gamma\":0.2") != std::string::npos);
    CHECK(ok.stdout_text.find("\"passes\":true") != std::string::npos);
    CHECK(ok.stdout_text.find("second_modulus") != std::string::npos);

    // analyze a generated file
    const fs::path g = scratch_dir() / "g.txt";
    run_cli("gen-graph --n 6 --prob 0.3 --seed 9 --out " + g.string());
    CHECK(run_cli("analyze --graph " + g.string() + " --gamma 0.2").exit_code == 0);
}

TEST_CASE("run: malformed configs exit 1 with diagnostics") {
    const fs::path bad = scratch_dir() / "bad.json";
    std::ofstream(bad) << "{ \"mode\": \"run\", }";
    const auto r = run_cli("run --config " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.stdout_text.find("line") != std::string::npos);

    const fs::path typo = scratch_dir() / "typo.json";
    std::ofstream(typo) << R"({"mode": "run", "graph": {"type": "ring", "n": 5},
                              "protocol": {"d_bar": 4}, "max_itres": 3})";
    const auto r2 = run_cli("run --config " + typo.string());
    CHECK(r2.exit_code == 1);
    CHECK(r2.stdout_text.find("unknown key") != std::string::npos);
}

TEST_CASE("run: d_bar below the diameter is refused") {
    const fs::path cfg = scratch_dir() / "small_dbar.json";
    std::ofstream(cfg) << R"({"mode": "run", "graph": {"type": "ring", "n": 5},
                             "protocol": {"d_bar": 3}})";
    const auto r = run_cli("run --config " + cfg.string());
    CHECK(r.exit_code == 1);
    CHECK(r.stdout_text.find("diameter") != std::string::npos);
}

TEST_CASE("run: non-convergence at the cap exits 2; trace and summary are written") {
    const fs::path cfg = scratch_dir() / "short.json";
    std::ofstream(cfg) << R"({"mode": "run",
        "graph": {"type": "ring", "n": 5},
        "x0": {"uniform": [0, 1000]},
        "protocol": {"gamma": 0.2, "alpha": 1.2, "d_bar": 4, "bits": 2},
        "max_iters": 40, "seed": 3,
        "output": {"trace_csv": "short_trace.csv", "summary_json": "short_summary.json"}})";
    const fs::path out = scratch_dir() / "short_out";
    const auto r = run_cli("run --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 2);
    CHECK(fs::exists(out / "short_trace.csv"));
    CHECK(fs::exists(out / "short_summary.json"));
    CHECK(!fs::exists(out / "short_trace.csv.tmp"));

    std::ifstream t(out / "short_trace.csv");
    std::string header;
    std::getline(t, header);
    CHECK(header == "k,agent,x,s,delta,sigma,zeta,consensus_error,bits_cumulative");
}

TEST_CASE("run: a convergent experiment exits 0 and honors overrides") {
    const fs::path cfg = scratch_dir() / "conv.json";
    std::ofstream(cfg) << R"({"mode": "run",
        "graph": {"type": "ring", "n": 5},
        "x0": {"uniform": [0, 1000]},
        "protocol": {"gamma": 0.2, "alpha": 1.2, "d_bar": 4, "bits": 12},
        "seed": 3,
        "output": {"summary_json": "conv_summary.json"}})";
    const fs::path out = scratch_dir() / "conv_out";
    const auto r = run_cli("run --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);

    // exact mode converges too and much faster
    const auto r2 = run_cli("run --config " + cfg.string() + " --out " + out.string() +
                            " --override exact_mode=true");
    CHECK(r2.exit_code == 0);

    // mode mismatch is refused
    const auto r3 = run_cli("sweep --config " + cfg.string());
    CHECK(r3.exit_code == 1);
}

TEST_CASE("PPACDC_OUT provides the default output directory") {
    const fs::path cfg = scratch_dir() / "envout.json";
    std::ofstream(cfg) << R"({"mode": "run",
        "graph": {"type": "ring", "n": 5},
        "protocol": {"gamma": 0.2, "alpha": 1.2, "d_bar": 4, "bits": 12},
        "max_iters": 4, "seed": 3,
        "output": {"summary_json": "env_summary.json"}})";
    const fs::path out = scratch_dir() / "env_out_dir";
    fs::remove_all(out);
    const auto r = run_cli("run --config " + cfg.string(), "PPACDC_OUT=" + out.string());
    CHECK(r.exit_code == 2);  // 4 rounds cannot converge
    CHECK(fs::exists(out / "env_summary.json"));
}

TEST_CASE("preset: unknown name exits 1") {
    const auto r = run_cli("preset no-such-preset");
    CHECK(r.exit_code == 1);
    CHECK(r.stdout_text.find("unknown preset") != std::string::npos);
}

TEST_CASE("preset: committed presets parse and point at their outputs") {
    // cheap spot check that the committed preset is loadable end to end;
    // the full replay against golden files lives in test_presets
    const fs::path cfg = fs::path(PPACDC_SOURCE_DIR) / "presets" / "paper-fig2.json";
    REQUIRE(fs::exists(cfg));
    const fs::path out = scratch_dir() / "fig2_quick";
    const auto r = run_cli("run --config " + cfg.string() + " --out " + out.string() +
                           " --override max_iters=8 --override bits_list=[4]");
    CHECK(r.exit_code == 2);  // 8 rounds cannot converge; files still written
    CHECK(fs::exists(out / "paper-fig2_trace_b4.csv"));
    CHECK(fs::exists(out / "paper-fig2_summary.json"));
}
