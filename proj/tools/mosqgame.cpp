// Command-line front end: simulate, report, sweep.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mosqgame/config.hpp"
#include "mosqgame/io.hpp"

namespace fs = std::filesystem;
using namespace mosqgame;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string config;
    std::string preset;
    std::string out;
    std::vector<std::string> sets;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "INI configuration file");
    cmd->add_option("--preset", o.preset, "named parameter set (see --list-presets)");
    cmd->add_option("--out", o.out, "output directory (default: $MOSQGAME_OUT_DIR or .)");
    cmd->add_option("--set", o.sets, "override, section.key=value (repeatable)");
    cmd->add_option("--threads", o.threads, "sweep worker threads (0 = all cores)");
}

RunConfig resolve(const CommonOptions& o) {
    RunConfig cfg = o.preset.empty() ? RunConfig{} : preset(o.preset);
    if (!o.config.empty()) cfg = load_ini_file(o.config, cfg);
    for (const auto& s : o.sets) apply_override(cfg, s);
    if (!o.out.empty()) cfg.output.dir = o.out;
    if (o.threads >= 0) cfg.sweep.threads = static_cast<unsigned>(o.threads);
    validate(cfg);
    return cfg;
}

fs::path output_dir(const RunConfig& cfg) {
    fs::path dir = cfg.output.dir;
    if (dir.empty()) {
        const char* env = std::getenv("MOSQGAME_OUT_DIR");
        dir = (env && *env) ? fs::path(env) : fs::path(".");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    os << text;
}

int cmd_simulate(const RunConfig& cfg) {
    const auto p = cfg.model_params();
    const auto tr = integrate(p, cfg.initial, cfg.t0, cfg.t1, cfg.integrator);
    const auto outcome = detect_attractor(tr, enumerate_equilibria(p), p, cfg.analysis);
    const auto dir = output_dir(cfg);
    std::ostringstream csv;
    write_trajectory_csv(csv, tr, cfg.output.stride);
    const auto csv_path = dir / (cfg.output.prefix + "_trajectory.csv");
    const auto json_path = dir / (cfg.output.prefix + "_summary.json");
    write_file(csv_path, csv.str());
    const auto summary = build_summary(cfg, tr, outcome);
    write_file(json_path, summary.dump(2) + "\n");
    std::cout << "outcome: " << outcome.label() << " (" << outcome.note << ")\n";
    if (outcome.oscillation && outcome.oscillation->sustained) {
        const auto& m = (*outcome.oscillation)[Component::L_v];
        std::cout << "period L_v: " << m.period << " days, amplitude L_v: " << m.amplitude << "\n";
    }
    std::cout << "wrote " << csv_path.string() << "\nwrote " << json_path.string() << "\n";
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    const auto report = build_report(cfg);
    const auto dir = output_dir(cfg);
    const auto path = dir / (cfg.output.prefix + "_report.json");
    write_file(path, report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_sweep(RunConfig cfg, bool metrics) {
    if (!cfg.sweep.enabled) throw ConfigError("sweep requires [sweep] enabled = true (or a sweep preset)");
    if (metrics) cfg.sweep.mode = SweepMode::Oscillations;
    const auto result = run_sweep(cfg.sweep_spec());
    const auto dir = output_dir(cfg);
    std::ostringstream csv;
    write_sweep_csv(csv, result);
    const auto csv_path = dir / (cfg.output.prefix + "_sweep.csv");
    const auto json_path = dir / (cfg.output.prefix + "_sweep.json");
    write_file(csv_path, csv.str());
    const bool trends = cfg.sweep.mode == SweepMode::Oscillations;
    const auto side = build_sweep_sidecar(cfg, result, trends);
    write_file(json_path, side.dump(2) + "\n");
    std::cout << "cells: " << result.cells.size() << "\n";
    std::cout << "analytic labels: " << side["summary"]["analytic_labels"].dump() << "\n";
    std::cout << "simulated labels: " << side["summary"]["simulated_labels"].dump() << "\n";
    if (trends) {
        for (const auto& row : oscillation_trends(result))
            std::cout << "trend r_c/r_d=" << row.axis2 << " cells=" << row.cells
                      << " spearman(N, amplitude)=" << row.spearman_amplitude
                      << " spearman(N, period)=" << row.spearman_period << "\n";
    }
    std::cout << "wrote " << csv_path.string() << "\nwrote " << json_path.string() << "\n";
    return 0;
}

int fail(const std::string& type, const std::string& msg, int code) {
    std::cerr << error_json(type, msg, code).dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mosquito breeding-site control game model"};
    app.require_subcommand(0, 1);
    bool list = false;
    app.add_flag("--list-presets", list, "print the preset names and exit");

    CommonOptions sim_o, rep_o, sw_o;
    bool metrics = false;
    auto* sim = app.add_subcommand("simulate", "integrate one trajectory and classify its outcome");
    add_common(sim, sim_o);
    auto* rep = app.add_subcommand("report", "equilibria, stability verdicts and Hopf quantities");
    add_common(rep, rep_o);
    auto* sw = app.add_subcommand("sweep", "two-parameter grid of analytic and simulated outcomes");
    add_common(sw, sw_o);
    sw->add_flag("--metrics", metrics, "oscillation amplitude/period grid with trend summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fail("usage", e.what(), kExitConfig);
    }

    try {
        if (list) {
            for (const auto& n : preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (sim->parsed()) return cmd_simulate(resolve(sim_o));
        if (rep->parsed()) return cmd_report(resolve(rep_o));
        if (sw->parsed()) return cmd_sweep(resolve(sw_o), metrics);
        std::cout << app.help();
        return kExitConfig;
    } catch (const ConfigError& e) {
        return fail("config", e.what(), kExitConfig);
    } catch (const InvalidParameter& e) {
        return fail("config", e.what(), kExitConfig);
    } catch (const InvalidState& e) {
        return fail("config", e.what(), kExitConfig);
    } catch (const NumericError& e) {
        return fail("numeric", e.what(), kExitNumeric);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
