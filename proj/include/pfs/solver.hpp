#pragma once

// Explicit first-order finite-volume engine: mesh, Rusanov interface flux,
// CFL time step, indicator update and boundary ghost states.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfs/closures.hpp"
#include "pfs/geometry.hpp"
#include "pfs/sources.hpp"

namespace pfs {

/// Numerical failure during time stepping. Carries the step counter and
/// the offending cell when known.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::optional<std::size_t> step = {},
                std::optional<std::size_t> cell = {})
        : std::runtime_error(what), step_(step), cell_(cell) {}

    std::optional<std::size_t> step() const { return step_; }
    std::optional<std::size_t> cell() const { return cell_; }

private:
    std::optional<std::size_t> step_;
    std::optional<std::size_t> cell_;
};

/// Relative dry floor: every cell keeps A >= kDryFloor * S.
inline constexpr double kDryFloor = 1e-10;

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

struct Mesh {
    double dX = 0.0;
    std::vector<CellGeometry> cells;
    std::vector<double> interfaces;  ///< N+1 interface abscissae
    std::vector<CellGeometry> faces;  ///< geometry sampled at the interfaces

    std::size_t size() const { return cells.size(); }
    double length() const { return interfaces.back() - interfaces.front(); }
};

/// Uniform mesh in X with `cells` cells; geometry sampled at cell centres.
Mesh make_mesh(const PipeProfile& profile, std::size_t cells);

// ---------------------------------------------------------------------------
// Boundary conditions
// ---------------------------------------------------------------------------

enum class BoundaryKind { Wall, Reservoir, Discharge, Valve };

struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Wall;
    /// Reservoir: free-surface level above the pipe axis [m]...
    std::optional<double> level;
    /// ...or pressurized density ratio A/S [-].
    std::optional<double> ratio;
    /// Discharge / valve: imposed Q [m^3/s], positive in +X.
    double discharge = 0.0;
    /// Valve: closure instant [s]; wall from then on.
    double close_time = 0.0;

    static BoundaryCondition wall() { return {}; }
    static BoundaryCondition reservoir_level(double level);
    static BoundaryCondition reservoir_ratio(double ratio);
    static BoundaryCondition inflow(double discharge);
    static BoundaryCondition valve(double discharge, double close_time);

    /// Throws std::invalid_argument when parameters are inconsistent with
    /// the adjacent cell (e.g. a reservoir level outside [-R, R]).
    void validate(const CellGeometry& adjacent) const;

    bool operator==(const BoundaryCondition&) const = default;
};

std::string to_string(BoundaryKind kind);
BoundaryKind boundary_kind_from_string(const std::string& name);

/// Ghost state outside the boundary next to `adjacent`.
FlowState apply_bc(const BoundaryCondition& bc, const FlowState& adjacent, const CellGeometry& geometry, double t);

// ---------------------------------------------------------------------------
// Fluxes, time step, indicator
// ---------------------------------------------------------------------------

struct Flux {
    double mass;
    double momentum;
};

/// Exact flux (Q, Q^2/A + p) of one state.
Flux physical_flux(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// |u| + c(A, E). The free-surface speed is capped at the acoustic speed; it
/// only exceeds it within a few ulps of a full section.
double wave_speed(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// Rusanov flux; each side's pressure and speed use its own geometry.
Flux interface_flux(const FlowState& left, const FlowState& right, const CellGeometry& left_geom,
                    const CellGeometry& right_geom, const FluidConstants& consts);

/// CFL * dX / max(|u| + c) over the given states.
double cfl_dt(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts, double cfl);

/// Indicator update treating the transition as a free boundary:
///  A >= S             -> pressurized
///  A <  S, E = 0      -> free surface
///  A <  S, E = 1      -> free surface only if a neighbour is free surface
/// Neighbours are read from the old field; the ghost regimes stand in for
/// the missing neighbours of the end cells (nullopt = no neighbour).
std::vector<Regime> update_indicator(std::span<const double> A, std::span<const Regime> E, const Mesh& mesh,
                                     std::optional<Regime> left_ghost = {},
                                     std::optional<Regime> right_ghost = {});

struct Boundaries {
    BoundaryCondition left;
    BoundaryCondition right;
};

/// One forward-Euler step of size dt from time t.
std::vector<FlowState> step(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts,
                            const Boundaries& bcs, double t, double dt);

/// Stable time step including the ghost states at time t.
double stable_dt(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts,
                 const Boundaries& bcs, double t, double cfl);

}  // namespace pfs
