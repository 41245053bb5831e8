#pragma once

// Scenario description and the time loop that turns it into a trajectory.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pfs/diagnostics.hpp"
#include "pfs/geometry.hpp"
#include "pfs/solver.hpp"

namespace pfs {

enum class InitialKind {
    Level,      ///< free-surface level above the axis [m]
    Elevation,  ///< hydrostatic free-surface elevation [m]; pressurized where above the crown
    Ratio,      ///< pressurized, A = ratio * S
    Head,       ///< subcritical steady state of given total head [m^2/s^2] and discharge
};

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

/// Initial data on the cells whose centre lies in [from, to).
struct InitialRegion {
    std::string name;
    double from = 0.0;
    double to = std::numeric_limits<double>::infinity();
    InitialKind kind = InitialKind::Level;
    double value = 0.0;
    std::optional<double> velocity;   ///< [m/s]
    std::optional<double> discharge;  ///< [m^3/s]; required for Head

    bool operator==(const InitialRegion&) const = default;
};

struct SimConfig {
    std::vector<ProfileSample> pipe_samples;  ///< inline profile, or
    std::string pipe_file;                    ///< path to an `x b R` table
    std::size_t cells = 100;
    double cfl = 0.9;
    double end_time = 1.0;
    double output_interval = 0.0;  ///< 0 = every step
    FluidConstants fluid;
    BoundaryCondition left;
    BoundaryCondition right;
    std::vector<InitialRegion> initial;
    std::vector<std::size_t> probes;

    /// Range checks that do not need the profile. Throws std::invalid_argument
    /// whose message starts with the offending key path.
    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

PipeProfile load_profile(const SimConfig& config);

/// Cell states from the initial regions (later regions override earlier
/// ones), followed by one indicator pass for consistency.
std::vector<FlowState> initial_states(const SimConfig& config, const Mesh& mesh);

class Simulation {
public:
    explicit Simulation(const SimConfig& config);
    Simulation(Mesh mesh, FluidConstants fluid, Boundaries bcs, std::vector<FlowState> states, double cfl);

    double time() const { return t_; }
    std::size_t steps() const { return steps_; }
    const Mesh& mesh() const { return mesh_; }
    const FluidConstants& fluid() const { return fluid_; }
    const Boundaries& boundaries() const { return bcs_; }
    const std::vector<FlowState>& states() const { return states_; }

    FlowState ghost_left() const;
    FlowState ghost_right() const;
    double stable_dt() const;

    /// One step of size dt; `land_on` (if given) is assigned to the clock
    /// afterwards so that output instants are hit exactly.
    void advance(double dt, std::optional<double> land_on = {});

    Snapshot snapshot() const;

private:
    Mesh mesh_;
    FluidConstants fluid_;
    Boundaries bcs_;
    std::vector<FlowState> states_;
    double cfl_;
    double t_ = 0.0;
    std::size_t steps_ = 0;
};

struct RunOptions {
    std::size_t max_steps = 50'000'000;
    /// Called after every step (not only at output instants).
    std::function<void(const Simulation&)> on_step;
};

Trajectory run(const SimConfig& config, const RunOptions& options = {});
Trajectory run(Simulation& sim, double end_time, double output_interval, const RunOptions& options = {});

}  // namespace pfs
