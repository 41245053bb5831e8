#pragma once

// Scalar checks on solver output: mass, entropy budget, still-water
// residual, head uniformity and water-hammer surge metrics.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pfs/closures.hpp"
#include "pfs/solver.hpp"

namespace pfs {

struct DiagnosticsRecord {
    double t = 0.0;
    double total_A = 0.0;                ///< sum A dX
    double total_entropy = 0.0;          ///< sum entropy dX
    double entropy_flux_boundary = 0.0;  ///< net entropy outflow through both ends
    double max_abs_u = 0.0;
    double max_density_ratio = 0.0;
    double head_spread = 0.0;            ///< max - min total head over cells
    std::vector<std::size_t> E_front_positions;  ///< interfaces where E changes
};

struct Snapshot {
    double t = 0.0;
    std::size_t step = 0;
    std::vector<FlowState> states;
    FlowState ghost_left;
    FlowState ghost_right;
    DiagnosticsRecord diagnostics;
};

struct Trajectory {
    Mesh mesh;
    FluidConstants fluid;
    std::vector<Snapshot> snapshots;
};

double mass_total(std::span<const FlowState> states, const Mesh& mesh);

/// Sum of entropy dX over cells [first, last).
double total_entropy(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts,
                     std::size_t first = 0, std::optional<std::size_t> last = {});

/// Interface entropy flux (psi_L + psi_R) / 2 at interface j in [0, N]; the
/// end interfaces use the ghost states.
double interface_entropy_flux(std::span<const FlowState> states, const FlowState& ghost_left,
                              const FlowState& ghost_right, const Mesh& mesh, const FluidConstants& consts,
                              std::size_t j);

/// Interface indices j (between cells j-1 and j) where the indicator jumps.
std::vector<std::size_t> regime_fronts(std::span<const FlowState> states);

DiagnosticsRecord make_record(double t, std::span<const FlowState> states, const FlowState& ghost_left,
                              const FlowState& ghost_right, const Mesh& mesh, const FluidConstants& consts);

struct CellWindow {
    std::size_t first = 0;
    std::optional<std::size_t> last;  ///< exclusive; nullopt = N
};

/// Entropy production between consecutive snapshots over a cell window:
/// d(sum entropy dX) + dt * (outflow - inflow), fluxes taken at the earlier
/// snapshot. Non-positive up to round-off for a dissipative scheme.
std::vector<double> entropy_budget(const Trajectory& traj, CellWindow window = {});

struct StillWaterResidual {
    double max_velocity = 0.0;
    double max_head_jump = 0.0;  ///< max |difference| of the hydrostatic head between neighbours
};

StillWaterResidual still_water_residual(std::span<const FlowState> states, const Mesh& mesh,
                                        const FluidConstants& consts);

struct SurgeMetrics {
    double peak_density_ratio = 1.0;
    std::optional<double> period;  ///< nullopt when (A/S - 1) never crosses zero twice
};

/// Peak of A/S at the probe cell and the oscillation period from linearly
/// interpolated zero crossings of A/S - 1.
SurgeMetrics surge_metrics(const Trajectory& traj, std::size_t probe);

}  // namespace pfs
