#include "pfs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfs {

namespace {

bool finite(const FlowState& s) { return std::isfinite(s.A) && std::isfinite(s.Q); }

struct CellEval {
    Flux flux;
    double speed;
};

CellEval evaluate(const FlowState& s, const CellGeometry& cell, const FluidConstants& consts) {
    const auto v = evaluate_closure(s, cell, consts);
    const double u = s.Q / s.A;
    const double c_ac = consts.sound_speed();
    double c = c_ac;
    if (s.E == Regime::FreeSurface && v.top_width > 0.0) {
        c = std::min(std::sqrt(consts.g * s.A * cell.cos_theta / v.top_width), c_ac);
    }
    return {{s.Q, s.Q * u + v.pressure}, std::abs(u) + c};
}

Flux rusanov(const FlowState& L, const FlowState& R, const CellEval& eL, const CellEval& eR) {
    const double s = std::max(eL.speed, eR.speed);
    return {0.5 * (eL.flux.mass + eR.flux.mass) - 0.5 * s * (R.A - L.A),
            0.5 * (eL.flux.momentum + eR.flux.momentum) - 0.5 * s * (R.Q - L.Q)};
}

}  // namespace

// ---------------------------------------------------------------------------

Mesh make_mesh(const PipeProfile& profile, std::size_t cells) {
    if (cells < 3) {
        throw std::invalid_argument("mesh needs at least 3 cells, got " + std::to_string(cells));
    }
    Mesh mesh;
    const double L = profile.length();
    mesh.dX = L / static_cast<double>(cells);
    mesh.cells.reserve(cells);
    mesh.interfaces.reserve(cells + 1);
    mesh.faces.reserve(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
        const double X = j == cells ? L : static_cast<double>(j) * mesh.dX;
        mesh.interfaces.push_back(X);
        mesh.faces.push_back(cell_geometry(profile.station(X)));
    }
    for (std::size_t i = 0; i < cells; ++i) {
        mesh.cells.push_back(cell_geometry(profile.station((static_cast<double>(i) + 0.5) * mesh.dX)));
    }
    return mesh;
}

// ---------------------------------------------------------------------------

BoundaryCondition BoundaryCondition::reservoir_level(double level) {
    BoundaryCondition bc;
    bc.kind = BoundaryKind::Reservoir;
    bc.level = level;
    return bc;
}

BoundaryCondition BoundaryCondition::reservoir_ratio(double ratio) {
    BoundaryCondition bc;
    bc.kind = BoundaryKind::Reservoir;
    bc.ratio = ratio;
    return bc;
}

BoundaryCondition BoundaryCondition::inflow(double discharge) {
    BoundaryCondition bc;
    bc.kind = BoundaryKind::Discharge;
    bc.discharge = discharge;
    return bc;
}

BoundaryCondition BoundaryCondition::valve(double discharge, double close_time) {
    BoundaryCondition bc;
    bc.kind = BoundaryKind::Valve;
    bc.discharge = discharge;
    bc.close_time = close_time;
    return bc;
}

void BoundaryCondition::validate(const CellGeometry& adjacent) const {
    switch (kind) {
    case BoundaryKind::Wall:
        return;
    case BoundaryKind::Reservoir:
        if (level.has_value() == ratio.has_value()) {
            throw std::invalid_argument("reservoir needs exactly one of level or ratio");
        }
        if (level && !(std::isfinite(*level) && *level > -adjacent.R && *level <= adjacent.R)) {
            throw std::invalid_argument("reservoir level " + std::to_string(*level) + " outside (-R, R] with R = " +
                                        std::to_string(adjacent.R));
        }
        if (ratio && !(std::isfinite(*ratio) && *ratio > 0.0)) {
            throw std::invalid_argument("reservoir ratio must be positive");
        }
        return;
    case BoundaryKind::Discharge:
        if (!std::isfinite(discharge)) {
            throw std::invalid_argument("discharge must be finite");
        }
        return;
    case BoundaryKind::Valve:
        if (!std::isfinite(discharge)) {
            throw std::invalid_argument("valve discharge must be finite");
        }
        if (!(close_time >= 0.0) || !std::isfinite(close_time)) {
            throw std::invalid_argument("valve close_time must be >= 0");
        }
        return;
    }
}

std::string to_string(BoundaryKind kind) {
    switch (kind) {
    case BoundaryKind::Wall:
        return "wall";
    case BoundaryKind::Reservoir:
        return "reservoir";
    case BoundaryKind::Discharge:
        return "discharge";
    case BoundaryKind::Valve:
        return "valve";
    }
    return "?";
}

BoundaryKind boundary_kind_from_string(const std::string& name) {
    for (auto k : {BoundaryKind::Wall, BoundaryKind::Reservoir, BoundaryKind::Discharge, BoundaryKind::Valve}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown boundary kind '" + name + "' (wall, reservoir, discharge, valve)");
}

FlowState apply_bc(const BoundaryCondition& bc, const FlowState& adjacent, const CellGeometry& geometry, double t) {
    switch (bc.kind) {
    case BoundaryKind::Wall:
        return {adjacent.A, -adjacent.Q, adjacent.E};
    case BoundaryKind::Reservoir: {
        bc.validate(geometry);
        if (bc.ratio) {
            return {*bc.ratio * geometry.S, adjacent.Q, Regime::Pressurized};
        }
        if (*bc.level >= geometry.R) {
            return {geometry.S, adjacent.Q, Regime::Pressurized};
        }
        const double A = std::max(geometry.section().wet_area(*bc.level), kDryFloor * geometry.S);
        return {A, adjacent.Q, Regime::FreeSurface};
    }
    case BoundaryKind::Discharge:
        return {adjacent.A, bc.discharge, adjacent.E};
    case BoundaryKind::Valve:
        if (t < bc.close_time) {
            return {adjacent.A, bc.discharge, adjacent.E};
        }
        return {adjacent.A, -adjacent.Q, adjacent.E};
    }
    return adjacent;
}

// ---------------------------------------------------------------------------

Flux physical_flux(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    return evaluate(state, cell, consts).flux;
}

double wave_speed(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    return evaluate(state, cell, consts).speed;
}

Flux interface_flux(const FlowState& left, const FlowState& right, const CellGeometry& left_geom,
                    const CellGeometry& right_geom, const FluidConstants& consts) {
    if (!finite(left) || !finite(right)) {
        throw SolverError("non-finite state in interface flux");
    }
    return rusanov(left, right, evaluate(left, left_geom, consts), evaluate(right, right_geom, consts));
}

double cfl_dt(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts, double cfl) {
    if (states.empty() || mesh.size() == 0) {
        throw SolverError("cfl_dt on an empty mesh");
    }
    if (states.size() != mesh.size()) {
        throw std::invalid_argument("state count does not match the mesh");
    }
    double smax = 0.0;
    bool all_dry = true;
    for (std::size_t i = 0; i < states.size(); ++i) {
        smax = std::max(smax, wave_speed(states[i], mesh.cells[i], consts));
        all_dry = all_dry && states[i].A <= kDryFloor * mesh.cells[i].S * (1.0 + 1e-9);
    }
    if (all_dry || !(smax > 0.0) || !std::isfinite(smax)) {
        throw SolverError("no finite positive wave speed (all-dry or non-finite states)");
    }
    return cfl * mesh.dX / smax;
}

std::vector<Regime> update_indicator(std::span<const double> A, std::span<const Regime> E, const Mesh& mesh,
                                     std::optional<Regime> left_ghost, std::optional<Regime> right_ghost) {
    const std::size_t n = A.size();
    if (E.size() != n || mesh.size() != n) {
        throw std::invalid_argument("update_indicator: field lengths differ");
    }
    std::vector<Regime> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (A[i] >= mesh.cells[i].S) {
            out[i] = Regime::Pressurized;
        } else if (E[i] == Regime::FreeSurface) {
            out[i] = Regime::FreeSurface;
        } else {
            const auto left = i > 0 ? std::optional<Regime>(E[i - 1]) : left_ghost;
            const auto right = i + 1 < n ? std::optional<Regime>(E[i + 1]) : right_ghost;
            const bool free_neighbour = left == Regime::FreeSurface || right == Regime::FreeSurface;
            out[i] = free_neighbour ? Regime::FreeSurface : Regime::Pressurized;
        }
    }
    return out;
}

double stable_dt(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts,
                 const Boundaries& bcs, double t, double cfl) {
    double dt = cfl_dt(states, mesh, consts, cfl);
    const auto gl = apply_bc(bcs.left, states.front(), mesh.cells.front(), t);
    const auto gr = apply_bc(bcs.right, states.back(), mesh.cells.back(), t);
    const double s = std::max(wave_speed(gl, mesh.cells.front(), consts), wave_speed(gr, mesh.cells.back(), consts));
    if (s > 0.0) {
        dt = std::min(dt, cfl * mesh.dX / s);
    }
    return dt;
}

std::vector<FlowState> step(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts,
                            const Boundaries& bcs, double t, double dt) {
    const std::size_t n = states.size();
    if (n != mesh.size() || n == 0) {
        throw std::invalid_argument("state count does not match the mesh");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be positive and finite");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!finite(states[i])) {
            throw SolverError("non-finite state", std::nullopt, i);
        }
    }

    const auto gl = apply_bc(bcs.left, states.front(), mesh.cells.front(), t);
    const auto gr = apply_bc(bcs.right, states.back(), mesh.cells.back(), t);

    // closure evaluations: ghosts at index 0 and n+1
    std::vector<CellEval> ev(n + 2);
    std::vector<double> src(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = mesh.cells[i];
        const auto v = evaluate_closure(states[i], cell, consts);
        ev[i + 1] = evaluate(states[i], cell, consts);
        const auto b = source_terms(states[i], cell, consts, v);
        // friction is applied implicitly below
        src[i] = b.slope + b.pressure_source - b.curvature;
    }
    ev[0] = evaluate(gl, mesh.cells.front(), consts);
    ev[n + 1] = evaluate(gr, mesh.cells.back(), consts);

    std::vector<Flux> F(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const FlowState& L = j == 0 ? gl : states[j - 1];
        const FlowState& R = j == n ? gr : states[j];
        F[j] = rusanov(L, R, ev[j], ev[j + 1]);
    }

    const double r = dt / mesh.dX;
    std::vector<double> A(n);
    std::vector<double> Q(n);
    std::vector<Regime> E(n);
    std::vector<bool> floored(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        A[i] = states[i].A - r * (F[i + 1].mass - F[i].mass);
        Q[i] = states[i].Q - r * (F[i + 1].momentum - F[i].momentum) + dt * src[i];
        E[i] = states[i].E;
        if (!std::isfinite(A[i]) || !std::isfinite(Q[i])) {
            throw SolverError("non-finite state after update", std::nullopt, i);
        }
        const double floor = kDryFloor * mesh.cells[i].S;
        if (A[i] < floor) {
            if (A[i] < -1e-6 * mesh.cells[i].S) {
                throw SolverError("positivity violation: A = " + std::to_string(A[i]), std::nullopt, i);
            }
            A[i] = floor;
            floored[i] = true;
        }
    }

    const auto E_new = update_indicator(A, E, mesh, gl.E, gr.E);

    std::vector<FlowState> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        FlowState s{A[i], Q[i], E_new[i]};
        if (floored[i]) {
            s.Q = 0.0;
        } else if (!std::isinf(consts.Ks) && s.Q != 0.0) {
            const double K = friction_coefficient(s, mesh.cells[i], consts);
            s.Q /= 1.0 + dt * consts.g * K * std::abs(s.Q) / s.A;
        }
        out[i] = s;
    }
    return out;
}

}  // namespace pfs
