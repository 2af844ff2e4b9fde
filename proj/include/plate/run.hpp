#pragma once

// Drivers behind the command-line tool. Each writes its files into
// cfg.output_dir (created if needed).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plate/config.hpp"
#include "plate/diagnostics.hpp"
#include "plate/integrator.hpp"

namespace plate {

/// Environment variable that overrides output_dir from the config.
inline constexpr const char* kOutputDirEnv = "PLATE_OUTPUT_DIR";

/// Applies the environment override, if set, to cfg.output_dir.
void apply_output_override(RunConfig& cfg);

struct RunOptions {
    bool quiet = false;
    /// Progress and summary lines go here unless quiet; null means std::cerr.
    std::ostream* log = nullptr;
};

struct SimulationOutcome {
    int exit_code = 0;
    bool partial = false;
    std::string error;
    SolverStats stats;
    std::vector<EnergySample> energies;
    std::vector<std::filesystem::path> files;
};

/// Integrates the configured problem and writes energy.csv (when
/// cfg.energies), frame_NNNNNN.csv (when cfg.snapshots) and run.json.
/// An integration failure writes whatever samples were produced, marks
/// run.json as partial and returns a nonzero exit code.
SimulationOutcome run_simulation(const RunConfig& cfg, const RunOptions& opts = {});

struct StabilityOutcome {
    int exit_code = 0;
    std::string error;
    /// Empty when the search could not start (bad bracket, no sign change).
    std::optional<StabilityReport> report;
};

/// Bisection for the onset of flutter along one flow parameter. Writes
/// stability.csv (parameter, abscissa per evaluation) and prints the
/// critical value.
StabilityOutcome run_stability(const RunConfig& cfg, FlowAxis axis, double lo, double hi,
                               const RunOptions& opts = {}, double rel_width = 1e-3);

struct SweepPoint {
    double value = 0.0;
    int exit_code = 0;
    double E0 = 0.0;
    double Ef = 0.0;
    double drift = 0.0;
    std::string error;
};

/// Independent simulations with `param` set to each value, run on up to
/// `jobs` threads. Run k writes into <output_dir>/<param>_<k>; a summary
/// goes to <output_dir>/sweep.csv. Returns nonzero if any run failed.
int run_sweep(const RunConfig& cfg, const std::string& param, const std::vector<double>& values,
              unsigned jobs, const RunOptions& opts = {}, std::vector<SweepPoint>* points = nullptr);

/// Frame text: Ny rows (j increasing), Nx comma-separated values per row.
std::string frame_csv(const GridSpec& grid, std::span<const double> w);

}  // namespace plate
