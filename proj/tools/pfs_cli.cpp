// pfs: batch front end.
//
//   pfs run --config scenario.cfg [--out-dir out] [--cfl 0.8] [--tmax 5] [--cells 400]
//   pfs run --preset water-hammer [--out-dir out]
//   pfs converge --config scenario.cfg --levels 50,100,200,400
//   pfs presets
//
// Failures print one line `error<TAB>category<TAB>message` to stderr.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfs/config.hpp"
#include "pfs/output.hpp"
#include "pfs/simulation.hpp"

namespace {

int report(const std::string& category, std::string message) {
    for (auto& ch : message) {
        if (ch == '\n' || ch == '\t') {
            ch = ' ';
        }
    }
    std::cerr << "error\t" << category << '\t' << message << '\n';
    return category == "usage" ? 2 : 1;
}

struct Common {
    std::string config;
    std::string preset;
    std::optional<double> cfl;
    std::optional<double> tmax;
    std::optional<std::size_t> cells;
};

pfs::SimConfig scenario(const Common& o) {
    if (o.config.empty() == o.preset.empty()) {
        throw CLI::ValidationError("give exactly one of --config or --preset");
    }
    auto c = o.config.empty() ? pfs::preset(o.preset) : pfs::load_config(o.config);
    if (o.cfl) {
        c.cfl = *o.cfl;
    }
    if (o.tmax) {
        c.end_time = *o.tmax;
    }
    if (o.cells && *o.cells != c.cells && *o.cells > 0) {
        // keep probes at the same place along the pipe
        for (auto& p : c.probes) {
            p = std::min(*o.cells - 1, (2 * p + 1) * *o.cells / (2 * c.cells));
        }
        c.cells = *o.cells;
    }
    c.validate();
    return c;
}

void add_common(CLI::App* cmd, Common& o) {
    cmd->add_option("--config", o.config, "scenario file");
    cmd->add_option("--preset", o.preset, "built-in scenario");
    cmd->add_option("--cfl", o.cfl, "override time.cfl");
    cmd->add_option("--tmax", o.tmax, "override time.end [s]");
    cmd->add_option("--cells", o.cells, "override mesh.cells");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed free-surface / pressurized pipe flow solver"};
    app.set_version_flag("--version", pfs::version_string());
    app.require_subcommand(1);

    Common run_opts;
    std::string out_dir = "pfs_out";
    auto* run_cmd = app.add_subcommand("run", "simulate one scenario and write CSV outputs");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--out-dir", out_dir, "output directory");

    Common conv_opts;
    std::vector<std::size_t> levels;
    auto* conv_cmd = app.add_subcommand("converge", "self-convergence table against the finest level");
    add_common(conv_cmd, conv_opts);
    conv_cmd->add_option("--levels", levels, "cell counts, e.g. 50,100,200")->delimiter(',')->required();

    auto* presets_cmd = app.add_subcommand("presets", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("usage", e.what());
    }

    try {
        if (*presets_cmd) {
            for (const auto& n : pfs::preset_names()) {
                std::cout << n << '\n';
            }
            return 0;
        }
        if (*run_cmd) {
            const auto config = scenario(run_opts);
            const auto t0 = std::chrono::steady_clock::now();
            const auto traj = pfs::run(config);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const auto manifest = pfs::emit_outputs(traj, traj.mesh, config, out_dir, wall);
            std::cout << "steps " << traj.snapshots.back().step << ", snapshots " << traj.snapshots.size()
                      << ", " << wall << " s\n";
            for (const auto& f : manifest.files) {
                std::cout << f << '\n';
            }
            return 0;
        }
        if (*conv_cmd) {
            const auto config = scenario(conv_opts);
            std::cout << pfs::convergence_harness(config, levels).to_csv();
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        return report("usage", e.what());
    } catch (const pfs::SolverError& e) {
        return report("solver", e.what());
    } catch (const pfs::ProfileError& e) {
        return report("profile", e.what());
    } catch (const std::invalid_argument& e) {
        return report("config", e.what());
    } catch (const std::exception& e) {
        return report("io", e.what());
    }
    return 0;
}
