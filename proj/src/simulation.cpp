#include "pfs/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pfs {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw std::invalid_argument(key + ": " + what);
}

/// Pressurized area with u^2/2 + c^2 ln(A/S) + g R cos + g Z = H.
double pressurized_area_for_head(double H, double Q, const CellGeometry& cell, const FluidConstants& consts) {
    const double c2 = consts.sound_speed() * consts.sound_speed();
    const double base = H - consts.g * cell.R * cell.cos_theta - consts.g * cell.Z;
    double A = cell.S;
    for (int it = 0; it < 60; ++it) {
        const double next = cell.S * std::exp((base - 0.5 * Q * Q / (A * A)) / c2);
        if (next == A) {
            break;
        }
        A = next;
    }
    return A;
}

FlowState hydrostatic(double eta, const CellGeometry& cell, const FluidConstants& consts) {
    const double h = (eta - cell.Z) / cell.cos_theta;
    if (h <= -cell.R) {
        return {kDryFloor * cell.S, 0.0, Regime::FreeSurface};
    }
    if (h >= cell.R) {
        return {pressurized_area_for_head(consts.g * eta, 0.0, cell, consts), 0.0, Regime::Pressurized};
    }
    return {std::max(cell.section().wet_area(h), kDryFloor * cell.S), 0.0, Regime::FreeSurface};
}

/// Subcritical steady state with total head H and discharge Q.
FlowState steady_subcritical(double H, double Q, const CellGeometry& cell, const FluidConstants& consts,
                             const std::string& key) {
    if (Q == 0.0) {
        return hydrostatic(H / consts.g, cell, consts);
    }
    const auto sec = cell.section();
    const double g = consts.g;
    const double R = cell.R;
    auto froude2 = [&](double h) {
        const double A = sec.wet_area(h);
        return Q * Q * sec.sigma(h) / (g * cell.cos_theta * A * A * A);
    };
    auto head = [&](double h) {
        const double A = sec.wet_area(h);
        return 0.5 * Q * Q / (A * A) + g * h * cell.cos_theta + g * cell.Z;
    };
    // critical level: Fr^2 decreases from +inf at the invert to 0 at the crown
    double lo = -R;
    double hi = R;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * R; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid > -R && froude2(mid) > 1.0 ? lo : hi) = mid;
    }
    const double hc = hi;
    if (head(hc) > H) {
        fail(key, "total head below the critical head for this discharge at X = " + std::to_string(cell.X_center));
    }
    const double h_top = R * (1.0 - 1e-12);
    if (head(h_top) < H) {
        return {pressurized_area_for_head(H, Q, cell, consts), Q, Regime::Pressurized};
    }
    lo = hc;
    hi = h_top;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * R; ++it) {
        const double mid = 0.5 * (lo + hi);
        (head(mid) < H ? lo : hi) = mid;
    }
    return {sec.wet_area(0.5 * (lo + hi)), Q, Regime::FreeSurface};
}

FlowState region_state(const InitialRegion& r, const CellGeometry& cell, const FluidConstants& consts) {
    const std::string key = "ic." + r.name;
    FlowState s;
    switch (r.kind) {
    case InitialKind::Level:
        if (!(r.value > -cell.R && r.value <= cell.R)) {
            fail(key + ".level", "level " + std::to_string(r.value) + " outside (-R, R] with R = " +
                                     std::to_string(cell.R) + " at X = " + std::to_string(cell.X_center));
        }
        s = {std::max(cell.section().wet_area(r.value), kDryFloor * cell.S), 0.0, Regime::FreeSurface};
        break;
    case InitialKind::Elevation:
        s = hydrostatic(r.value, cell, consts);
        break;
    case InitialKind::Ratio:
        s = {r.value * cell.S, 0.0, Regime::Pressurized};
        break;
    case InitialKind::Head:
        return steady_subcritical(r.value, *r.discharge, cell, consts, key);
    }
    if (s.A <= kDryFloor * cell.S) {
        return s;
    }
    if (r.velocity) {
        s.Q = *r.velocity * s.A;
    } else if (r.discharge) {
        s.Q = *r.discharge;
    }
    return s;
}

void check_bc(const BoundaryCondition& bc, const CellGeometry& cell, const std::string& key) {
    try {
        bc.validate(cell);
    } catch (const std::invalid_argument& e) {
        fail(key, e.what());
    }
}

}  // namespace

std::string to_string(InitialKind kind) {
    switch (kind) {
    case InitialKind::Level:
        return "level";
    case InitialKind::Elevation:
        return "elevation";
    case InitialKind::Ratio:
        return "ratio";
    case InitialKind::Head:
        return "head";
    }
    return "?";
}

InitialKind initial_kind_from_string(const std::string& name) {
    for (auto k : {InitialKind::Level, InitialKind::Elevation, InitialKind::Ratio, InitialKind::Head}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown initial condition kind '" + name + "'");
}

void SimConfig::validate() const {
    if (pipe_samples.empty() == pipe_file.empty()) {
        fail("pipe", "give exactly one of pipe.samples or pipe.file");
    }
    if (!pipe_samples.empty() && pipe_samples.size() < 2) {
        fail("pipe.samples", "at least two samples are required");
    }
    if (cells < 3) {
        fail("mesh.cells", "must be >= 3");
    }
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        fail("time.cfl", "must lie in (0, 1], got " + std::to_string(cfl));
    }
    if (!(end_time >= 0.0) || !std::isfinite(end_time)) {
        fail("time.end", "must be finite and >= 0");
    }
    if (!(output_interval >= 0.0) || !std::isfinite(output_interval)) {
        fail("time.output_interval", "must be finite and >= 0");
    }
    try {
        fluid.validate();
    } catch (const std::invalid_argument& e) {
        fail("fluid", e.what());
    }
    for (const auto& [bc, key] : {std::pair{&left, "bc.left"}, std::pair{&right, "bc.right"}}) {
        // geometry-dependent checks happen once the mesh exists
        CellGeometry huge;
        huge.R = std::numeric_limits<double>::infinity();
        check_bc(*bc, huge, key);
    }
    if (initial.empty()) {
        fail("ic", "at least one initial region is required");
    }
    for (const auto& r : initial) {
        const std::string key = "ic." + r.name;
        if (r.name.empty()) {
            fail("ic", "region without a name");
        }
        if (!(r.from < r.to)) {
            fail(key, "from must be < to");
        }
        if (!std::isfinite(r.value)) {
            fail(key + "." + to_string(r.kind), "must be finite");
        }
        if (r.velocity && r.discharge) {
            fail(key, "give at most one of velocity or discharge");
        }
        if (r.kind == InitialKind::Ratio && !(r.value > 0.0)) {
            fail(key + ".ratio", "must be > 0");
        }
        if (r.kind == InitialKind::Head && !r.discharge) {
            fail(key + ".discharge", "required with head");
        }
    }
    for (auto p : probes) {
        if (p >= cells) {
            fail("output.probes", "probe cell " + std::to_string(p) + " outside the mesh of " +
                                      std::to_string(cells) + " cells");
        }
    }
}

PipeProfile load_profile(const SimConfig& config) {
    auto samples = config.pipe_file.empty() ? config.pipe_samples : load_profile_table(config.pipe_file);
    return build_profile(std::move(samples));
}

std::vector<FlowState> initial_states(const SimConfig& config, const Mesh& mesh) {
    const std::size_t n = mesh.size();
    std::vector<FlowState> out(n);
    std::vector<bool> covered(n, false);
    for (const auto& r : config.initial) {
        for (std::size_t i = 0; i < n; ++i) {
            const double X = mesh.cells[i].X_center;
            if (X >= r.from && X < r.to) {
                out[i] = region_state(r, mesh.cells[i], config.fluid);
                covered[i] = true;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!covered[i]) {
            fail("ic", "cell " + std::to_string(i) + " (X = " + std::to_string(mesh.cells[i].X_center) +
                           ") is not covered by any region");
        }
    }
    std::vector<double> A(n);
    std::vector<Regime> E(n);
    for (std::size_t i = 0; i < n; ++i) {
        A[i] = out[i].A;
        E[i] = out[i].E;
    }
    const auto E2 = update_indicator(A, E, mesh);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].E = E2[i];
    }
    return out;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(const SimConfig& config) : cfl_(config.cfl) {
    config.validate();
    mesh_ = make_mesh(load_profile(config), config.cells);
    fluid_ = config.fluid;
    bcs_ = {config.left, config.right};
    check_bc(bcs_.left, mesh_.cells.front(), "bc.left");
    check_bc(bcs_.right, mesh_.cells.back(), "bc.right");
    states_ = initial_states(config, mesh_);
}

Simulation::Simulation(Mesh mesh, FluidConstants fluid, Boundaries bcs, std::vector<FlowState> states, double cfl)
    : mesh_(std::move(mesh)), fluid_(fluid), bcs_(std::move(bcs)), states_(std::move(states)), cfl_(cfl) {
    if (states_.size() != mesh_.size()) {
        throw std::invalid_argument("state count does not match the mesh");
    }
    fluid_.validate();
    check_bc(bcs_.left, mesh_.cells.front(), "bc.left");
    check_bc(bcs_.right, mesh_.cells.back(), "bc.right");
}

FlowState Simulation::ghost_left() const { return apply_bc(bcs_.left, states_.front(), mesh_.cells.front(), t_); }

FlowState Simulation::ghost_right() const { return apply_bc(bcs_.right, states_.back(), mesh_.cells.back(), t_); }

double Simulation::stable_dt() const { return pfs::stable_dt(states_, mesh_, fluid_, bcs_, t_, cfl_); }

void Simulation::advance(double dt, std::optional<double> land_on) {
    try {
        states_ = step(states_, mesh_, fluid_, bcs_, t_, dt);
    } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " (step " + std::to_string(steps_ + 1) +
                              (e.cell() ? ", cell " + std::to_string(*e.cell()) : std::string()) + ")",
                          steps_ + 1, e.cell());
    }
    t_ = land_on.value_or(t_ + dt);
    ++steps_;
}

Snapshot Simulation::snapshot() const {
    Snapshot s;
    s.t = t_;
    s.step = steps_;
    s.states = states_;
    s.ghost_left = ghost_left();
    s.ghost_right = ghost_right();
    s.diagnostics = make_record(t_, s.states, s.ghost_left, s.ghost_right, mesh_, fluid_);
    return s;
}

Trajectory run(Simulation& sim, double end_time, double output_interval, const RunOptions& options) {
    Trajectory traj{sim.mesh(), sim.fluid(), {}};
    traj.snapshots.push_back(sim.snapshot());
    const std::size_t start = sim.steps();
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t k = 1;
    double next = output_interval > 0.0 ? output_interval : inf;
    while (next <= sim.time()) {
        next = static_cast<double>(++k) * output_interval;
    }
    while (sim.time() < end_time) {
        if (sim.steps() - start >= options.max_steps) {
            throw SolverError("step limit of " + std::to_string(options.max_steps) + " reached at t = " +
                                  std::to_string(sim.time()),
                              sim.steps());
        }
        double dt = sim.stable_dt();
        const double stop = std::min(end_time, next);
        std::optional<double> land;
        if (sim.time() + dt >= stop) {
            dt = stop - sim.time();
            land = stop;
        }
        sim.advance(dt, land);
        if (options.on_step) {
            options.on_step(sim);
        }
        bool emit = output_interval == 0.0 || sim.time() >= end_time;
        if (sim.time() >= next) {
            emit = true;
            while (next <= sim.time()) {
                next = static_cast<double>(++k) * output_interval;
            }
        }
        if (emit) {
            traj.snapshots.push_back(sim.snapshot());
        }
    }
    return traj;
}

Trajectory run(const SimConfig& config, const RunOptions& options) {
    Simulation sim(config);
    return run(sim, config.end_time, config.output_interval, options);
}

}  // namespace pfs
