#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "plate/config.hpp"

using namespace plate;
using doctest::Approx;

namespace {

const char* kMinimal = R"(
[plate]
D = 2
nu = 0.25
[grid]
Lx = 1.5
Ly = 1
Nx = 7
Ny = 6
[time]
t0 = 0
tf = 0.5
ns = 11
)";

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.D == 2.0);
    CHECK(c.Nx == 7);
    CHECK(c.k0 == 0.0);
    CHECK(c.a1 == 0.0);
    CHECK(c.winit.is_zero());
    CHECK(c.method == Method::ImplicitTrapezoidal);
    CHECK(c.energies);
    CHECK_FALSE(c.snapshots);
    CHECK(c.output_dir == "output");
    CHECK(c.grid().dx() == Approx(0.25));
    CHECK(c.params().nu == 0.25);
    CHECK(c.time_grid().ns == 11);
    CHECK_FALSE(c.initial_velocity());
}

TEST_CASE("comments, quoting and header-less keys") {
    const RunConfig c = parse_config(
        "D = 1  # stiffness\nLx = 1\nLy = 1\nNx = 5\nNy = 5\nnu = 0.3\nt0 = 0\ntf = 1\nns = 3\n"
        "vinit = \"x * (1 - x)\"\nmethod = rk4\nsnapshots = yes\noutput_dir = 'runs/a b'\n");
    CHECK(c.vinit.text() == "x * (1 - x)");
    CHECK(c.vinit(0.5, 0.0, 0.0) == Approx(0.25));
    CHECK(c.method == Method::ExplicitRK4);
    CHECK(c.snapshots);
    CHECK(c.output_dir == "runs/a b");
    const NodalFunction v = c.initial_velocity();
    REQUIRE(v);
    CHECK(v(0.5, 0.2) == Approx(0.25));
}

TEST_CASE("out-of-range Poisson ratio names the variable and range") {
    std::string text = kMinimal;
    text.replace(text.find("nu = 0.25"), 9, "nu = 0.7");
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("nu (Poisson ratio) must lie in (0, 1/2), got 0.7"),
                         ConfigError);
}

TEST_CASE("syntax errors carry line numbers") {
    CHECK(error_line("D = 1\nfoo = 2\n") == 2);
    CHECK(error_line("[plate]\nNx = 5\n") == 2);
    CHECK(error_line("D = 1\n\nD = 2\n") == 3);
    CHECK(error_line("[bogus]\n") == 1);
    CHECK(error_line("D =\n") == 1);
    CHECK(error_line("D = abc\n") == 1);
    CHECK(error_line("Nx = 5.5\n") == 1);
    CHECK(error_line("just words\n") == 1);
    CHECK(error_line("[plate\n") == 1);
    CHECK(error_line("winit = x + t\n") == 1);
    CHECK(error_line("method = euler\n") == 1);
    CHECK(error_line("energies = maybe\n") == 1);
    CHECK_THROWS_WITH(parse_config("D = 1\nfoo = 2\n"), doctest::Contains("line 2: unknown key 'foo'"));
    CHECK_THROWS_WITH(parse_config("[plate]\nNx = 5\n"), doctest::Contains("belongs to section [grid]"));
}

TEST_CASE("missing keys and constraint errors") {
    CHECK_THROWS_WITH_AS(parse_config("D = 1\n"), doctest::Contains("missing required key"), ConfigError);
    std::string text = kMinimal;
    text.replace(text.find("Nx = 7"), 6, "Nx = 3");
    CHECK_THROWS_WITH(parse_config(text), doctest::Contains("Nx must be at least 5"));
    text = kMinimal;
    text.replace(text.find("tf = 0.5"), 8, "tf = -1");
    CHECK_THROWS_WITH(parse_config(text), doctest::Contains("tf must be greater than t0"));
    text = kMinimal;
    text += "[plate]\n";
    CHECK_NOTHROW(parse_config(text));
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "k0 = -1\n"), ConfigError);
}

TEST_CASE("forcing may depend on time") {
    const RunConfig c = parse_config(std::string(kMinimal) + "[forcing]\nf = sin(pi * t) * x\n");
    CHECK(c.f.uses(Expression::T));
    CHECK(c.forcing().f(1.0, 0.0, 0.5) == Approx(1.0));
}

TEST_CASE("canonical text round-trips") {
    RunConfig c = parse_config(std::string(kMinimal) +
                               "[plate]\nk0 = 0.1\nk1 = 0.02\na1 = 12.5\n"
                               "[loads]\ng_E = 0.3 * y\nh_N = -x\n"
                               "[solver]\nrel_tol = 1e-8\nmax_step = 0.01\n"
                               "[initial]\nwinit = x^2\n");
    c.D = 0.1;
    const RunConfig back = parse_config(c.to_text());
    CHECK(back.to_text() == c.to_text());
    CHECK(back.D == 0.1);
    CHECK(back.a1 == 12.5);
    CHECK(back.g_E.text() == "0.3 * y");
    CHECK(back.rel_tol == 1e-8);
    CHECK(back.winit(0.5, 0, 0) == 0.25);
}

TEST_CASE("sweepable parameters") {
    RunConfig c = parse_config(kMinimal);
    c.set_number("a2", 4.0);
    CHECK(c.get_number("a2") == 4.0);
    CHECK(c.params().a2 == 4.0);
    CHECK_THROWS_AS(c.set_number("Nx", 9), ConfigError);
    CHECK(RunConfig::sweepable().size() == 6);
}

TEST_CASE("configs load from text files and run records") {
    const auto dir = std::filesystem::temp_directory_path() / "plate_test_config";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "a.cfg") << kMinimal;
        nlohmann::json j;
        j["config_text"] = std::string(kMinimal);
        std::ofstream(dir / "run.json") << j.dump();
        std::ofstream(dir / "broken.json") << "{\"x\": 1}";
    }
    CHECK(load_config(dir / "a.cfg").Nx == 7);
    CHECK(load_config(dir / "run.json").Ny == 6);
    CHECK_THROWS_WITH(load_config(dir / "broken.json"), doctest::Contains("config_text"));
    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
