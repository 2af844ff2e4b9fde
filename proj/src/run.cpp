#include "plate/run.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace plate {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void apply_output_override(RunConfig& cfg) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) cfg.output_dir = dir;
}

namespace {

std::ostream& log_stream(const RunOptions& o) { return o.log ? *o.log : std::cerr; }

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string energy_csv(const std::vector<EnergySample>& series) {
    std::string s = "t,U,K,E\n";
    for (const auto& e : series) {
        s += format_double(e.t);
        s += ',';
        s += format_double(e.U);
        s += ',';
        s += format_double(e.K);
        s += ',';
        s += format_double(e.E);
        s += '\n';
    }
    return s;
}

std::string frame_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06zu.csv", k);
    return buf;
}

ordered_json resolved_config(const RunConfig& c) {
    ordered_json j;
    j["D"] = c.D;
    j["nu"] = c.nu;
    j["k0"] = c.k0;
    j["k1"] = c.k1;
    j["a1"] = c.a1;
    j["a2"] = c.a2;
    j["Lx"] = c.Lx;
    j["Ly"] = c.Ly;
    j["Nx"] = c.Nx;
    j["Ny"] = c.Ny;
    j["t0"] = c.t0;
    j["tf"] = c.tf;
    j["ns"] = c.ns;
    j["winit"] = c.winit.text();
    j["vinit"] = c.vinit.text();
    j["g_N"] = c.g_N.text();
    j["g_S"] = c.g_S.text();
    j["g_E"] = c.g_E.text();
    j["h_N"] = c.h_N.text();
    j["h_S"] = c.h_S.text();
    j["h_E"] = c.h_E.text();
    j["f"] = c.f.text();
    j["method"] = to_string(c.method);
    j["rel_tol"] = c.rel_tol;
    j["abs_tol"] = c.abs_tol;
    j["max_step"] = c.max_step;
    j["energies"] = c.energies;
    j["snapshots"] = c.snapshots;
    j["output_dir"] = c.output_dir;
    return j;
}

ordered_json stats_json(const SolverStats& s) {
    ordered_json j;
    j["steps"] = s.steps;
    j["rejections"] = s.rejections;
    j["linear_solves"] = s.linear_solves;
    j["factorizations"] = s.factorizations;
    j["min_step"] = s.min_step;
    j["max_step"] = s.max_step;
    return j;
}

}  // namespace

std::string frame_csv(const GridSpec& grid, std::span<const double> w) {
    if (w.size() != grid.unknowns()) throw ContractViolation("frame_csv: wrong length");
    std::string s;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            if (i > 0) s += ',';
            s += i == 0 ? std::string("0") : format_double(w[grid.flatten(i, j)]);
        }
        s += '\n';
    }
    return s;
}

SimulationOutcome run_simulation(const RunConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    SimulationOutcome out;
    std::ostream& log = log_stream(opts);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    const GridSpec grid = cfg.grid();
    const TimeGrid tg = cfg.time_grid();
    Trajectory traj;
    std::shared_ptr<const PlateModel> model;
    std::string status = "ok";
    try {
        model = std::make_shared<const PlateModel>(grid, cfg.params(), cfg.loads(), cfg.forcing());
        const SemiDiscreteSystem sys = assemble(model);
        const Eigen::VectorXd y0 =
            initial_state(grid, cfg.initial_displacement(), cfg.initial_velocity());
        if (!opts.quiet)
            log << "simulate: " << grid.nx() << "x" << grid.ny() << " grid, " << sys.size()
                << " states, " << tg.ns << " samples on [" << tg.t0 << ", " << tg.tf << "], "
                << to_string(cfg.method) << '\n';
        try {
            traj = integrate(sys, y0, tg, cfg.solver());
        } catch (const IntegrationError& e) {
            out.error = e.what();
            out.partial = true;
            if (e.partial()) traj = *e.partial();
        }
    } catch (const std::exception& e) {
        out.error = e.what();
        out.partial = true;
    }
    out.stats = traj.stats;
    if (out.partial) {
        status = "failed";
        out.exit_code = 2;
    }

    if (model && !traj.states.empty()) out.energies = energy_series(traj, *model);

    if (cfg.energies) {
        const fs::path p = dir / "energy.csv";
        write_file(p, energy_csv(out.energies));
        out.files.push_back(p);
    }
    if (cfg.snapshots) {
        const auto n = static_cast<std::size_t>(grid.unknowns());
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            const fs::path p = dir / frame_name(k);
            write_file(p, frame_csv(grid, std::span<const double>(traj.states[k].data(), n)));
            out.files.push_back(p);
        }
    }

    ordered_json meta;
    meta["status"] = status;
    meta["partial"] = out.partial;
    meta["error"] = out.partial ? ordered_json(out.error) : ordered_json(nullptr);
    meta["samples_requested"] = tg.ns;
    meta["samples_written"] = traj.states.size();
    meta["unknowns"] = grid.unknowns();
    meta["config"] = resolved_config(cfg);
    meta["config_text"] = cfg.to_text();
    meta["stats"] = stats_json(out.stats);
    if (!out.energies.empty()) {
        meta["energy"] = {{"E_first", out.energies.front().E},
                          {"E_last", out.energies.back().E},
                          {"max_relative_drift", max_relative_drift(out.energies)}};
    }
    ordered_json files = ordered_json::array();
    for (const auto& f : out.files) files.push_back(f.filename().string());
    meta["files"] = files;
    const fs::path mp = dir / "run.json";
    write_file(mp, meta.dump(2) + "\n");
    out.files.push_back(mp);

    if (!opts.quiet) {
        if (out.partial)
            log << "simulate: FAILED after " << traj.states.size() << " of " << tg.ns
                << " samples: " << out.error << '\n';
        else
            log << "simulate: " << out.stats.steps << " steps, " << out.stats.rejections
                << " rejections, max relative energy drift "
                << (out.energies.empty() ? 0.0 : max_relative_drift(out.energies)) << '\n';
    }
    return out;
}

StabilityOutcome run_stability(const RunConfig& cfg, FlowAxis axis, double lo, double hi,
                               const RunOptions& opts, double rel_width) {
    cfg.validate();
    StabilityOutcome out;
    std::ostream& log = log_stream(opts);
    try {
        out.report = find_critical_flow(cfg.params(), cfg.grid(), axis, lo, hi, cfg.loads(), rel_width);
    } catch (const std::exception& e) {
        out.error = e.what();
        out.exit_code = 1;
        if (!opts.quiet) log << "stability: " << out.error << '\n';
        return out;
    }
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::string csv = std::string(to_string(axis)) + ",abscissa,bracket_width\n";
    for (const auto& h : out.report->history)
        csv += format_double(h.parameter) + "," + format_double(h.abscissa) + "," +
               format_double(h.bracket_width) + "\n";
    write_file(dir / "stability.csv", csv);

    if (!opts.quiet) {
        for (std::size_t k = 2; k < out.report->history.size(); ++k)
            log << "  " << to_string(axis) << " = " << format_double(out.report->history[k].parameter)
                << "  abscissa = " << format_double(out.report->history[k].abscissa)
                << "  width = " << format_double(out.report->history[k].bracket_width) << '\n';
        for (const auto& w : out.report->warnings) log << "warning: " << w << '\n';
    }
    std::cout << "critical " << to_string(axis) << " = " << format_double(out.report->critical)
              << " (bracket width " << format_double(out.report->final_width) << ")\n";
    return out;
}

int run_sweep(const RunConfig& cfg, const std::string& param, const std::vector<double>& values,
              unsigned jobs, const RunOptions& opts, std::vector<SweepPoint>* points_out) {
    cfg.validate();
    (void)cfg.get_number(param);  // rejects unknown parameters up front
    if (values.empty()) throw ConfigError("sweep: no values given");

    // Validate every point before starting any work.
    std::vector<RunConfig> runs;
    for (std::size_t k = 0; k < values.size(); ++k) {
        RunConfig c = cfg;
        c.set_number(param, values[k]);
        c.output_dir = (fs::path(cfg.output_dir) / (param + "_" + std::to_string(k))).string();
        try {
            c.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("sweep value " + format_double(values[k]) + ": " + e.what());
        }
        runs.push_back(std::move(c));
    }

    std::vector<SweepPoint> points(values.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    std::ostream& log = log_stream(opts);
    auto worker = [&] {
        for (std::size_t k = next++; k < runs.size(); k = next++) {
            SweepPoint& p = points[k];
            p.value = values[k];
            try {
                const SimulationOutcome r = run_simulation(runs[k], RunOptions{true, nullptr});
                p.exit_code = r.exit_code;
                p.error = r.error;
                if (!r.energies.empty()) {
                    p.E0 = r.energies.front().E;
                    p.Ef = r.energies.back().E;
                    p.drift = max_relative_drift(r.energies);
                }
            } catch (const std::exception& e) {
                p.exit_code = 1;
                p.error = e.what();
            }
            if (!opts.quiet) {
                std::lock_guard lock(log_mutex);
                log << "sweep: " << param << " = " << format_double(p.value)
                    << (p.exit_code == 0 ? "  ok" : "  FAILED: " + p.error) << '\n';
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(runs.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string csv = param + ",status,E_first,E_last,max_relative_drift,dir\n";
    int rc = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        if (p.exit_code != 0) rc = 2;
        csv += format_double(p.value) + "," + (p.exit_code == 0 ? "ok" : "failed") + "," +
               format_double(p.E0) + "," + format_double(p.Ef) + "," + format_double(p.drift) + "," +
               param + "_" + std::to_string(k) + "\n";
    }
    fs::create_directories(cfg.output_dir);
    write_file(fs::path(cfg.output_dir) / "sweep.csv", csv);
    if (points_out) *points_out = std::move(points);
    return rc;
}

}  // namespace plate
