#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plate/run.hpp"

using namespace plate;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

RunConfig base(const fs::path& out, int n = 8) {
    std::ostringstream t;
    t << "D = 1\nnu = 0.3\nLx = 1\nLy = 1\nNx = " << n << "\nNy = " << n << "\nt0 = 0\ntf = 0.5\nns = 11\n"
      << "output_dir = " << out.string() << "\n";
    return parse_config(t.str());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const RunOptions kQuiet{true, nullptr};

}  // namespace

TEST_CASE("zero data stays at rest") {
    TempDir dir("plate_test_rest");
    RunConfig c = base(dir.path);
    c.snapshots = true;
    const auto r = run_simulation(c, kQuiet);
    REQUIRE(r.exit_code == 0);
    const auto e = lines(slurp(dir.path / "energy.csv"));
    REQUIRE(e.size() == 12);
    CHECK(e[0] == "t,U,K,E");
    CHECK(e[1] == "0,0,0,0");
    CHECK(e[11] == "0.5,0,0,0");
    const auto f = lines(slurp(dir.path / "frame_000010.csv"));
    REQUIRE(f.size() == 8);
    for (const auto& l : f) CHECK(l == "0,0,0,0,0,0,0,0");
    CHECK(fs::exists(dir.path / "frame_000000.csv"));
}

TEST_CASE("run metadata") {
    TempDir dir("plate_test_meta");
    RunConfig c = base(dir.path);
    c.vinit = Expression::parse("x");
    const auto r = run_simulation(c, kQuiet);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "run.json"));
    CHECK(j["status"] == "ok");
    CHECK(j["partial"] == false);
    CHECK(j["samples_written"] == 11);
    CHECK(j["unknowns"] == 56);
    CHECK(j["energy"]["max_relative_drift"].get<double>() <= 5e-3);
    CHECK(parse_config(j["config_text"].get<std::string>()).to_text() == c.to_text());
    CHECK_FALSE(fs::exists(dir.path / "frame_000000.csv"));
}

TEST_CASE("damped energy never grows") {
    TempDir dir("plate_test_damped");
    RunConfig c = base(dir.path);
    c.vinit = Expression::parse("x");
    c.k0 = 0.5;
    c.k1 = 0.01;
    const auto r = run_simulation(c, kQuiet);
    REQUIRE(r.exit_code == 0);
    for (std::size_t k = 1; k < r.energies.size(); ++k)
        CHECK(r.energies[k].E <= r.energies[k - 1].E * (1 + 1e-9));
}

TEST_CASE("identical configs give identical bytes") {
    TempDir a("plate_test_det_a"), b("plate_test_det_b");
    RunConfig c = base(a.path);
    c.winit = Expression::parse("0.1 * x^2");
    c.f = Expression::parse("sin(pi * t) * y");
    c.snapshots = true;
    REQUIRE(run_simulation(c, kQuiet).exit_code == 0);
    c.output_dir = b.path.string();
    REQUIRE(run_simulation(c, kQuiet).exit_code == 0);
    CHECK(slurp(a.path / "energy.csv") == slurp(b.path / "energy.csv"));
    CHECK(slurp(a.path / "frame_000007.csv") == slurp(b.path / "frame_000007.csv"));
}

TEST_CASE("integration failure writes a partial record") {
    TempDir dir("plate_test_fail");
    RunConfig c = base(dir.path);
    // load overflows to infinity part-way through the run
    c.f = Expression::parse("exp(5000 * t)");
    const auto r = run_simulation(c, kQuiet);
    CHECK(r.exit_code != 0);
    CHECK(r.partial);
    const auto j = nlohmann::json::parse(slurp(dir.path / "run.json"));
    CHECK(j["status"] == "failed");
    CHECK(j["partial"] == true);
    CHECK(j["error"].is_string());
    CHECK(j["samples_written"].get<int>() < 11);
    CHECK(lines(slurp(dir.path / "energy.csv")).size() == j["samples_written"].get<std::size_t>() + 1);
}

TEST_CASE("stability driver") {
    TempDir dir("plate_test_stab");
    RunConfig c = base(dir.path);
    c.k0 = 0.1;
    std::ostringstream log;
    const auto r = run_stability(c, FlowAxis::A1, 0.0, 1024.0, RunOptions{false, &log});
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.report);
    CHECK(r.report->critical > 0.0);
    const auto csv = lines(slurp(dir.path / "stability.csv"));
    CHECK(csv[0] == "a1,abscissa,bracket_width");
    CHECK(csv.size() == r.report->history.size() + 1);

    const auto bad = run_stability(c, FlowAxis::A1, 5.0, 5.0, kQuiet);
    CHECK(bad.exit_code != 0);
    CHECK_FALSE(bad.report);
    CHECK(bad.error.find("lo < hi") != std::string::npos);

    c.k0 = 0.0;
    const auto flat = run_stability(c, FlowAxis::A1, 0.0, 10.0, kQuiet);
    CHECK(flat.exit_code != 0);
    CHECK(flat.error.find("no sign change") != std::string::npos);
}

TEST_CASE("parameter sweep") {
    TempDir dir("plate_test_sweep");
    RunConfig c = base(dir.path, 6);
    c.vinit = Expression::parse("x");
    std::vector<SweepPoint> pts;
    CHECK(run_sweep(c, "k0", {0.0, 0.5, 1.0}, 3, kQuiet, &pts) == 0);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].Ef > pts[1].Ef);
    CHECK(pts[1].Ef > pts[2].Ef);
    for (int k = 0; k < 3; ++k) CHECK(fs::exists(dir.path / ("k0_" + std::to_string(k)) / "energy.csv"));
    const auto csv = lines(slurp(dir.path / "sweep.csv"));
    REQUIRE(csv.size() == 4);
    CHECK(csv[0] == "k0,status,E_first,E_last,max_relative_drift,dir");
    CHECK_THROWS_AS(run_sweep(c, "Nx", {5.0}, 1, kQuiet), ConfigError);
}

TEST_CASE("output directory override") {
    RunConfig c = base("from_config");
    ::setenv(kOutputDirEnv, "from_env", 1);
    apply_output_override(c);
    ::unsetenv(kOutputDirEnv);
    CHECK(c.output_dir == "from_env");
    apply_output_override(c);
    CHECK(c.output_dir == "from_env");
}

TEST_CASE("frame layout") {
    const GridSpec g(1, 1, 5, 5);
    std::vector<double> w(g.unknowns());
    w[g.flatten(4, 2)] = 0.5;
    const auto f = lines(frame_csv(g, w));
    REQUIRE(f.size() == 5);
    CHECK(f[2] == "0,0,0,0,0.5");
}
