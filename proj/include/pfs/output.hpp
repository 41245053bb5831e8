#pragma once

// CSV/JSON emission of trajectories and the self-convergence harness.

#include <optional>
#include <string>
#include <vector>

#include "pfs/simulation.hpp"

namespace pfs {

struct RunManifest {
    std::string config;   ///< serialized config echo
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::string> files;

    std::string to_json() const;
};

std::string version_string();

/// Writes snapshots.csv, diagnostics.csv, probes.csv (when probes are set)
/// and manifest.json into out_dir, creating it if needed.
RunManifest emit_outputs(const Trajectory& traj, const Mesh& mesh, const SimConfig& config,
                         const std::string& out_dir, double wall_seconds);

struct ConvergenceRow {
    std::size_t cells = 0;
    double error_A = 0.0;  ///< L1 distance to the finest level
    double error_Q = 0.0;
    std::optional<double> order_A;  ///< observed order against the next finer level
    std::optional<double> order_Q;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;  ///< sorted from coarse to fine; last row is the reference

    std::string to_csv() const;
};

/// L1 projection of a fine solution onto a coarse mesh (cell averages when
/// the counts divide, centre sampling otherwise).
std::vector<FlowState> restrict_to(const Trajectory& fine, const Mesh& coarse);

/// Runs `config` at every level and compares the final states with the
/// finest one.
ConvergenceTable convergence_harness(const SimConfig& config, std::vector<std::size_t> levels);

}  // namespace pfs
