// Command-line driver: simulate, stability, sweep.

#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "plate/run.hpp"

namespace {

plate::RunConfig load(const std::string& path, const std::string& out_flag) {
    plate::RunConfig cfg = plate::load_config(path);
    plate::apply_output_override(cfg);
    if (!out_flag.empty()) cfg.output_dir = out_flag;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clamped-free-free-free Kirchhoff plate simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    bool quiet = false;
    std::string out_dir;
    app.add_flag("-q,--quiet", quiet, "Suppress progress output");
    app.add_option("-o,--output", out_dir,
                   std::string("Output directory (overrides the config and ") + plate::kOutputDirEnv + ")");

    std::string config_path;

    auto* sim = app.add_subcommand("simulate", "Integrate a configured run");
    sim->add_option("config", config_path, "Config file (or a run.json record)")->required();

    auto* stab = app.add_subcommand("stability", "Locate the flutter onset along a1 or a2");
    stab->add_option("config", config_path, "Config file")->required();
    std::string axis = "a1";
    std::vector<double> bracket;
    double rel_width = 1e-3;
    stab->add_option("--axis", axis, "Flow parameter")->check(CLI::IsMember({"a1", "a2"}));
    stab->add_option("--bracket", bracket, "lo,hi")->delimiter(',')->expected(2)->required();
    stab->add_option("--rel-width", rel_width, "Stop at this fraction of the initial bracket")
        ->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "Run independent simulations over one parameter");
    sweep->add_option("config", config_path, "Config file")->required();
    std::string param;
    std::vector<double> values;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    sweep->add_option("--param", param, "Parameter to vary")
        ->required()
        ->check(CLI::IsMember(plate::RunConfig::sweepable()));
    sweep->add_option("--values", values, "Values (comma or space separated)")
        ->delimiter(',')
        ->required();
    sweep->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    const plate::RunOptions opts{quiet, nullptr};
    try {
        plate::RunConfig cfg = load(config_path, out_dir);
        if (sim->parsed()) return plate::run_simulation(cfg, opts).exit_code;
        if (stab->parsed()) {
            const auto axis_v = axis == "a1" ? plate::FlowAxis::A1 : plate::FlowAxis::A2;
            const auto r = plate::run_stability(cfg, axis_v, bracket[0], bracket[1], opts, rel_width);
            if (r.exit_code != 0 && quiet) std::cerr << "stability: " << r.error << '\n';
            return r.exit_code;
        }
        return plate::run_sweep(cfg, param, values, jobs, opts);
    } catch (const plate::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
