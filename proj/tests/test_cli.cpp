#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "degstab/cli.hpp"
#include "degstab/config.hpp"
#include "degstab/errors.hpp"
#include "degstab/evolution.hpp"

namespace fs = std::filesystem;
using namespace degstab;

namespace {

const std::string kData = DEGSTAB_TEST_DATA;

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("degstab_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct Run {
    int code = -1;
    std::string err;
};

Run run_cli(const std::string& args, const fs::path& out) {
    fs::path err = out / "stderr.txt";
    std::string cmd = std::string("\"") + DEGSTAB_CLI_PATH + "\" " + args + " --out \"" + out.string() +
                      "\" --quiet 2> \"" + err.string() + "\" > /dev/null";
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p, std::string& header) {
    std::ifstream f(p);
    std::getline(f, header);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

fs::path write_ini(const fs::path& dir, const std::string& body) {
    fs::path p = dir / "scenario.ini";
    std::ofstream(p) << body;
    return p;
}

const char* kMinimal = R"([coefficient]
kind = power
alpha = 1
[operator]
kind = beam_nondiv
n = 16
[run]
dt = 0.01
t_end = 0.5
)";

}  // namespace

TEST_CASE("simulate writes the trajectory, margins and report") {
    fs::path out = fresh_dir("simulate");
    Run r = run_cli("--config " + kData + "/beam_linear.ini", out);
    REQUIRE(r.code == exit_code::ok);
    std::string header;
    auto rows = read_csv(out / "trajectory.csv", header);
    CHECK(header == kTrajectoryHeader);
    CHECK(rows.size() == 101);
    double prev = INFINITY;
    for (const auto& row : rows) {
        REQUIRE(row.size() == 10);
        for (const auto& c : row) {
            char* end = nullptr;
            double v = std::strtod(c.c_str(), &end);
            CHECK(*end == '\0');
            CHECK(std::isfinite(v));
        }
        double E = std::stod(row[1]);
        CHECK(E <= prev * (1 + 1e-12));
        prev = E;
    }
    auto margins = read_csv(out / "bound_margins.csv", header);
    CHECK(header == "t,E_total,envelope,margin,premise,lower_margin");
    CHECK(margins.size() == 101);
    std::string report = slurp(out / "report.txt");
    for (const char* key : {"command: simulate", "kind: beam_nondiv", "fitted_rate:", "energy_identity_residual:",
                            "bound_upper_holds: true", "blow_up: false"})
        CHECK(report.find(key) != std::string::npos);
}

TEST_CASE("runs are bit-identical") {
    fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    REQUIRE(run_cli("--config " + kData + "/small_data.ini", a).code == 0);
    REQUIRE(run_cli("--config " + kData + "/small_data.ini", b).code == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "report.txt") == slurp(b / "report.txt"));
}

TEST_CASE("certify exit codes") {
    fs::path out = fresh_dir("certify");
    CHECK(run_cli("--command certify --config " + kData + "/small_data.ini", out).code == exit_code::ok);
    std::string cert = slurp(out / "certificate.txt");
    CHECK(cert.find("feasible: true") != std::string::npos);
    CHECK(cert.find("rho:") != std::string::npos);
    fs::path out2 = fresh_dir("certify_huge");
    CHECK(run_cli("--command certify --config " + kData + "/huge_kernel.ini", out2).code == exit_code::infeasible);
    CHECK(slurp(out2 / "certificate.txt").find("feasible: false") != std::string::npos);
}

TEST_CASE("module errors map to exit codes") {
    fs::path out = fresh_dir("bad_alpha");
    Run r = run_cli("--config " + kData + "/bad_alpha.ini", out);
    CHECK(r.code == exit_code::config);
    CHECK(r.err.find("KOutOfRange") != std::string::npos);

    fs::path out2 = fresh_dir("blow_up");
    Run b = run_cli("--config " + kData + "/blow_up.ini", out2);
    CHECK(b.code == exit_code::blow_up);
    CHECK(slurp(out2 / "report.txt").find("blow_up: true") != std::string::npos);
    CHECK(fs::exists(out2 / "trajectory.csv"));
}

TEST_CASE("config errors exit with 3") {
    fs::path out = fresh_dir("config");
    std::string typo = std::string(kMinimal) + "dtt = 0.1\n";
    Run r = run_cli("--config " + write_ini(out, typo).string(), out);
    CHECK(r.code == exit_code::config);
    CHECK(r.err.find("run.dtt") != std::string::npos);

    Run m = run_cli("--config " + write_ini(out, "[coefficient]\nkind = power\nalpha = 1\n").string(), out);
    CHECK(m.code == exit_code::config);
    CHECK(m.err.find("missing") != std::string::npos);

    CHECK(run_cli("--config " + (out / "nope.ini").string(), out).code == exit_code::config);
    CHECK(run_cli("--command integrate --config " + write_ini(out, kMinimal).string(), out).code == exit_code::config);
}

TEST_CASE("config parser") {
    ScenarioConfig cfg = parse_config(std::string("; comment\n") + kMinimal);
    CHECK(cfg.get("operator.kind") == "beam_nondiv");
    CHECK(cfg.integer("operator.n") == 16);
    CHECK(cfg.number("run.dt") == doctest::Approx(0.01));
    CHECK(cfg.number_or("operator.beta", 2.5) == 2.5);
    CHECK_THROWS_AS(cfg.get("kernel.k0"), Error);
    CHECK(split_list("0, 0.01 ,0.5").size() == 3);
    BuiltScenario bs = build_scenario(cfg);
    CHECK(bs.run.dt == doctest::Approx(0.01));
    CHECK(bs.scenario.steps() == 50);
    CHECK(bs.scenario.kernel.k0 == 0.0);
}

TEST_CASE("sweep writes one row per value") {
    fs::path out = fresh_dir("sweep");
    std::string body = std::string(kMinimal) + "sweep_key = kernel.k0\nsweep_values = 0, 0.01, 0.1\n" +
                       "[kernel]\nkind = constant\nk0 = 0\ntau = 0.5\n[initial]\npreset = slowest 1\n";
    Run r = run_cli("--command sweep --config " + write_ini(out, body).string(), out);
    REQUIRE(r.code == exit_code::ok);
    std::string header;
    auto rows = read_csv(out / "sweep.csv", header);
    CHECK(header == kSweepHeader);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[0][0]) == 0.0);
    CHECK(std::stod(rows[2][0]) == doctest::Approx(0.1));
    for (const auto& row : rows) CHECK(row.size() == 8);
}

TEST_CASE("generator dump is Matrix Market") {
    fs::path out = fresh_dir("dump");
    fs::path mm = out / "A.mtx";
    CHECK(run_cli("--config " + kData + "/beam_linear.ini --dump-generator " + mm.string(), out).code == 0);
    std::string text = slurp(mm);
    CHECK(text.rfind("%%MatrixMarket", 0) == 0);
}

TEST_CASE("in-process run reports to the given streams") {
    CliOptions o;
    o.config = kData + "/beam_linear.ini";
    o.out_dir = fresh_dir("inproc").string();
    o.command = Command::Certify;
    std::ostringstream out, err;
    CHECK(run(o, out, err) == exit_code::ok);
    CHECK(out.str().find("feasible: true") != std::string::npos);
    CHECK(err.str().empty());
}
