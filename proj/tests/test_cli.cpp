// End-to-end checks of the installed CLI binary: exit codes, file outputs,
// and byte-determinism across worker counts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(CAPCAV_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) {
        result.output += buf.data();
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("capcav_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("mode-solve: table, json, determinism, exit code") {
    const fs::path dir = fresh_dir("mode");
    const std::string out = " --out " + dir.string();

    const RunResult first = run("mode-solve" + out);
    CHECK(first.exit_code == 0);
    CHECK(first.output.find("n_eff") != std::string::npos);
    REQUIRE(fs::exists(dir / "mode.json"));
    const std::string json1 = slurp(dir / "mode.json");

    const RunResult second = run("mode-solve" + out);
    CHECK(second.exit_code == 0);
    CHECK(slurp(dir / "mode.json") == json1);
    CHECK(json1.find("\"n_eff\"") != std::string::npos);
    CHECK(json1.find("config_hash") != std::string::npos);
}

TEST_CASE("mode-solve: below-cutoff geometry exits 2") {
    const fs::path dir = fresh_dir("cutoff");
    write_file(dir / "cfg",
               "geometry.d_in_nm = 2\ngeometry.d_out_nm = 10\n");
    const RunResult r =
        run("--config " + (dir / "cfg").string() + " mode-solve --out " +
            dir.string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("config errors exit 4 and list every violation") {
    const fs::path dir = fresh_dir("badcfg");
    write_file(dir / "cfg",
               "grating.duty_cycle = 1.5\nemitter.beta0 = 7\n");
    const RunResult r =
        run("--config " + (dir / "cfg").string() + " mode-solve");
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("duty_cycle must be in (0,1)") != std::string::npos);
    CHECK(r.output.find("beta0") != std::string::npos);
}

TEST_CASE("missing config file exits 3") {
    const RunResult r = run("--config /nonexistent/cfg mode-solve");
    CHECK(r.exit_code == 3);
}

TEST_CASE("CAPCAV_DEFAULT_CONFIG env var is honored") {
    const fs::path dir = fresh_dir("envcfg");
    write_file(dir / "cfg", "grating.duty_cycle = 1.5\n");
    const std::string cmd = "CAPCAV_DEFAULT_CONFIG=" + (dir / "cfg").string() +
                            " " + CAPCAV_BIN + " mode-solve 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::string output;
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) output += buf.data();
    const int status = pclose(pipe);
    CHECK(WEXITSTATUS(status) == 4);
    CHECK(output.find("duty_cycle") != std::string::npos);
}

TEST_CASE("spectrum export has the documented schema") {
    const fs::path dir = fresh_dir("spectrum");
    // Pin the cavity parameters to skip calibration (fast, deterministic).
    write_file(dir / "cfg",
               "grating.delta_n = 0.0234\n"
               "grating.base_n_eff = 1.26659\n"
               "grating.slat_loss = 0.99991\n");
    const RunResult r = run("--config " + (dir / "cfg").string() +
                            " --svg spectrum --out " + dir.string());
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "spectrum.csv"));
    const std::string csv = slurp(dir / "spectrum.csv");
    CHECK(csv.rfind("# capcav ", 0) == 0);
    CHECK(csv.find("wavelength_nm,T,R\n") != std::string::npos);
    CHECK(fs::exists(dir / "spectrum.svg"));

    // plot regenerates an SVG from the CSV
    const RunResult p = run("plot --kind spectrum --in " +
                            (dir / "spectrum.csv").string() + " --out " +
                            dir.string());
    CHECK(p.exit_code == 0);

    // unknown kind -> exit 3
    const RunResult bad = run("plot --kind nonsense --in " +
                              (dir / "spectrum.csv").string() + " --out " +
                              dir.string());
    CHECK(bad.exit_code == 3);
}

TEST_CASE("sweep: 7-row N sweep, T0 decreasing, determinism across jobs") {
    const fs::path dir1 = fresh_dir("sweep1");
    const fs::path dir8 = fresh_dir("sweep8");
    const std::string cfg_text =
        "grating.delta_n = 0.0234\n"
        "grating.base_n_eff = 1.26659\n"
        "grating.slat_loss = 0.99991\n"
        "sweep.parameter = grating.slat_count\n"
        "sweep.from = 200\nsweep.to = 500\nsweep.step = 50\n";
    write_file(dir1 / "cfg", cfg_text);

    const RunResult serial = run("--config " + (dir1 / "cfg").string() +
                                 " --jobs 1 sweep --out " + dir1.string());
    CHECK(serial.exit_code == 0);
    const RunResult parallel = run("--config " + (dir1 / "cfg").string() +
                                   " --jobs 8 sweep --out " + dir8.string());
    CHECK(parallel.exit_code == 0);

    const std::string csv1 = slurp(dir1 / "sweep.csv");
    CHECK(csv1 == slurp(dir8 / "sweep.csv"));
    CHECK(slurp(dir1 / "sweep.json") == slurp(dir8 / "sweep.json"));

    // 7 rows + comment + header.
    int lines = 0;
    for (char ch : csv1) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 9);

    // T0 column decreases with N.
    std::istringstream in(csv1);
    std::string row;
    std::getline(in, row); // comment
    std::getline(in, row); // header
    double prev_t0 = 2.0;
    int rows = 0;
    while (std::getline(in, row)) {
        std::stringstream ss(row);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() >= 9);
        const double t0 = std::stod(cells[5]);
        CHECK(t0 < prev_t0);
        prev_t0 = t0;
        ++rows;
    }
    CHECK(rows == 7);
}

TEST_CASE("sweep: zero-length range writes a header-only file") {
    const fs::path dir = fresh_dir("sweep0");
    write_file(dir / "cfg",
               "grating.delta_n = 0.0234\n"
               "grating.base_n_eff = 1.26659\n"
               "grating.slat_loss = 0.99991\n"
               "sweep.from = 500\nsweep.to = 200\nsweep.step = 50\n");
    const RunResult r = run("--config " + (dir / "cfg").string() +
                            " sweep --out " + dir.string());
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    int lines = 0;
    for (char ch : csv) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 2); // comment + header only
}

TEST_CASE("position sweep exports eta vs delta_z") {
    const fs::path dir = fresh_dir("possweep");
    write_file(dir / "cfg",
               "sweep.parameter = emitter.delta_z_nm\n"
               "sweep.from = 0\nsweep.to = 488\nsweep.step = 1\n"
               "emitter.pol_axis = y\n");
    const RunResult r = run("--config " + (dir / "cfg").string() +
                            " --svg sweep --out " + dir.string());
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "position_y.csv"));
    const std::string csv = slurp(dir / "position_y.csv");
    CHECK(csv.find("delta_z_nm,eta\n") != std::string::npos);
    CHECK(fs::exists(dir / "position_y.svg"));
    CHECK(r.output.find("2 maxima") != std::string::npos);
}

TEST_CASE("reproduce-paper: default run passes, gamma change fails 2g0") {
    const fs::path dir = fresh_dir("paper");
    const RunResult ok = run("reproduce-paper --out " + dir.string());
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("ALL ROWS PASS") != std::string::npos);
    REQUIRE(fs::exists(dir / "report.json"));
    CHECK(slurp(dir / "report.json").find("\"all_pass\": true") !=
          std::string::npos);

    // gamma doubled: the 2g0 row deviates by sqrt(2) and fails.
    write_file(dir / "gamma.cfg", "emitter.gamma_ghz = 2.4\n");
    const RunResult bad = run("--config " + (dir / "gamma.cfg").string() +
                              " reproduce-paper --out " + dir.string());
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("FAIL") != std::string::npos);
}

TEST_CASE("reproduce-paper: zero tolerances fail every row") {
    const fs::path dir = fresh_dir("tol0");
    std::string cfg =
        "report.tol_q = 0\nreport.tol_kappa = 0\nreport.tol_q_sc = 0\n"
        "report.tol_finesse = 0\nreport.tol_finesse_sc = 0\n"
        "report.tol_one_pass_loss = 0\nreport.tol_two_g0 = 0\n"
        "report.tol_eta_cav_pp = 0\nreport.tol_eta_fdtd = 0\n"
        "report.tol_lambda_res_nm = 0\nreport.tol_q_cav = 0\n"
        "report.tol_kappa_sc = 0\nreport.l_eff_lo_um = 0\n"
        "report.l_eff_hi_um = 0\n";
    write_file(dir / "cfg", cfg);
    const RunResult r = run("--config " + (dir / "cfg").string() +
                            " reproduce-paper --out " + dir.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("PASS\n") == std::string::npos);
}

TEST_CASE("paper default config file parses and matches built-ins") {
    const fs::path shipped = fs::path(CAPCAV_CONFIG_DIR) / "paper_default.cfg";
    REQUIRE(fs::exists(shipped));
    const fs::path dir = fresh_dir("shipped");
    const RunResult with_file = run("--config " + shipped.string() +
                                    " mode-solve --out " + dir.string());
    CHECK(with_file.exit_code == 0);
    const std::string json_file = slurp(dir / "mode.json");
    const RunResult builtin = run("mode-solve --out " + dir.string());
    CHECK(builtin.exit_code == 0);
    CHECK(slurp(dir / "mode.json") == json_file);
}
