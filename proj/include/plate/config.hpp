#pragma once

// Run configuration: line-oriented "key = value" text with optional
// [section] headers.
//
//   [plate]    D nu k0 k1 a1 a2
//   [grid]     Lx Ly Nx Ny
//   [time]     t0 tf ns
//   [initial]  winit vinit             (expressions in x, y)
//   [loads]    g_N g_S g_E h_N h_S h_E (expressions in x, y)
//   [forcing]  f                       (expression in x, y, t)
//   [solver]   method rel_tol abs_tol max_step
//   [output]   energies snapshots output_dir
//
// '#' starts a comment. Keys before the first header may come from any
// section. Unknown or repeated keys are errors.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plate/expression.hpp"
#include "plate/ghost.hpp"
#include "plate/integrator.hpp"
#include "plate/mesh.hpp"
#include "plate/operator.hpp"

namespace plate {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    /// 1-based source line, or 0 for whole-config constraint errors.
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct RunConfig {
    double D = 1.0;
    double Lx = 1.0;
    double Ly = 1.0;
    int Nx = 0;
    int Ny = 0;
    double nu = 0.3;
    double k0 = 0.0;
    double k1 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double t0 = 0.0;
    double tf = 1.0;
    int ns = 0;

    bool energies = true;
    bool snapshots = false;

    Expression winit = Expression::constant(0.0);
    Expression vinit = Expression::constant(0.0);
    Expression g_N = Expression::constant(0.0);
    Expression g_S = Expression::constant(0.0);
    Expression g_E = Expression::constant(0.0);
    Expression h_N = Expression::constant(0.0);
    Expression h_S = Expression::constant(0.0);
    Expression h_E = Expression::constant(0.0);
    Expression f = Expression::constant(0.0);

    Method method = Method::ImplicitTrapezoidal;
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    double max_step = 0.0;

    std::string output_dir = "output";

    /// Throws ConfigError naming the offending variable.
    void validate() const;

    GridSpec grid() const;
    PlateParams params() const;
    TimeGrid time_grid() const;
    IntegratorConfig solver() const;
    BoundaryLoads loads() const;
    ForcingSpec forcing() const;
    NodalFunction initial_displacement() const;
    NodalFunction initial_velocity() const;

    /// Canonical text form; parse_config(to_text()) reproduces this config.
    std::string to_text() const;

    /// Names accepted by set_number / get_number (the numeric plate parameters).
    static const std::vector<std::string>& sweepable();
    double get_number(std::string_view key) const;
    void set_number(std::string_view key, double value);
};

RunConfig parse_config(std::string_view text);

/// Reads a config file. A ".json" file is taken to be a run metadata record
/// and its "config_text" field is parsed instead.
RunConfig load_config(const std::filesystem::path& path);

/// "%.17g" formatting used in every output file.
std::string format_double(double v);

}  // namespace plate
