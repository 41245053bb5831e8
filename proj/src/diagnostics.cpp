#include "pfs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pfs {

double mass_total(std::span<const FlowState> states, const Mesh& mesh) {
    double sum = 0.0;
    for (const auto& s : states) {
        sum += s.A;
    }
    return sum * mesh.dX;
}

double total_entropy(std::span<const FlowState> states, const Mesh& mesh, const FluidConstants& consts,
                     std::size_t first, std::optional<std::size_t> last) {
    const std::size_t end = last.value_or(states.size());
    if (first > end || end > states.size()) {
        throw std::out_of_range("entropy window outside the mesh");
    }
    double sum = 0.0;
    for (std::size_t i = first; i < end; ++i) {
        sum += entropy(states[i], mesh.cells[i], consts);
    }
    return sum * mesh.dX;
}

double interface_entropy_flux(std::span<const FlowState> states, const FlowState& ghost_left,
                              const FlowState& ghost_right, const Mesh& mesh, const FluidConstants& consts,
                              std::size_t j) {
    const std::size_t n = states.size();
    if (j > n) {
        throw std::out_of_range("interface index outside the mesh");
    }
    const auto& gL = mesh.cells[j == 0 ? 0 : j - 1];
    const auto& gR = mesh.cells[j == n ? n - 1 : j];
    const FlowState& L = j == 0 ? ghost_left : states[j - 1];
    const FlowState& R = j == n ? ghost_right : states[j];
    return 0.5 * (entropy_flux(L, gL, consts) + entropy_flux(R, gR, consts));
}

std::vector<std::size_t> regime_fronts(std::span<const FlowState> states) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < states.size(); ++i) {
        if (states[i].E != states[i - 1].E) {
            out.push_back(i);
        }
    }
    return out;
}

DiagnosticsRecord make_record(double t, std::span<const FlowState> states, const FlowState& ghost_left,
                              const FlowState& ghost_right, const Mesh& mesh, const FluidConstants& consts) {
    DiagnosticsRecord r;
    r.t = t;
    r.total_A = mass_total(states, mesh);
    r.total_entropy = total_entropy(states, mesh, consts);
    const std::size_t n = states.size();
    r.entropy_flux_boundary = interface_entropy_flux(states, ghost_left, ghost_right, mesh, consts, n) -
                              interface_entropy_flux(states, ghost_left, ghost_right, mesh, consts, 0);
    double hmin = std::numeric_limits<double>::infinity();
    double hmax = -hmin;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = states[i];
        const auto& cell = mesh.cells[i];
        r.max_abs_u = std::max(r.max_abs_u, std::abs(s.velocity()));
        r.max_density_ratio = std::max(r.max_density_ratio, density_ratio(s.A, s.E, cell.S));
        const double h = total_head(s, cell, consts);
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
    }
    r.head_spread = n == 0 ? 0.0 : hmax - hmin;
    r.E_front_positions = regime_fronts(states);
    return r;
}

std::vector<double> entropy_budget(const Trajectory& traj, CellWindow window) {
    std::vector<double> out;
    const auto& snaps = traj.snapshots;
    if (snaps.size() < 2) {
        return out;
    }
    const std::size_t n = traj.mesh.size();
    const std::size_t last = window.last.value_or(n);
    if (window.first >= last || last > n) {
        throw std::out_of_range("entropy window outside the mesh");
    }
    out.reserve(snaps.size() - 1);
    for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
        const auto& a = snaps[k];
        const auto& b = snaps[k + 1];
        const double dt = b.t - a.t;
        const double e0 = total_entropy(a.states, traj.mesh, traj.fluid, window.first, last);
        const double e1 = total_entropy(b.states, traj.mesh, traj.fluid, window.first, last);
        const double in =
            interface_entropy_flux(a.states, a.ghost_left, a.ghost_right, traj.mesh, traj.fluid, window.first);
        const double outflow =
            interface_entropy_flux(a.states, a.ghost_left, a.ghost_right, traj.mesh, traj.fluid, last);
        out.push_back((e1 - e0) + dt * (outflow - in));
    }
    return out;
}

StillWaterResidual still_water_residual(std::span<const FlowState> states, const Mesh& mesh,
                                        const FluidConstants& consts) {
    StillWaterResidual r;
    double prev = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        r.max_velocity = std::max(r.max_velocity, std::abs(s.velocity()));
        const double h = total_head({s.A, 0.0, s.E}, mesh.cells[i], consts);
        if (i > 0) {
            r.max_head_jump = std::max(r.max_head_jump, std::abs(h - prev));
        }
        prev = h;
    }
    return r;
}

SurgeMetrics surge_metrics(const Trajectory& traj, std::size_t probe) {
    if (probe >= traj.mesh.size()) {
        throw std::out_of_range("probe cell " + std::to_string(probe) + " outside the mesh of " +
                                std::to_string(traj.mesh.size()) + " cells");
    }
    SurgeMetrics m;
    const double S = traj.mesh.cells[probe].S;
    std::vector<double> crossings;
    double prev_t = 0.0;
    double prev_f = 0.0;
    bool first = true;
    for (const auto& snap : traj.snapshots) {
        const double ratio = snap.states[probe].A / S;
        m.peak_density_ratio = std::max(m.peak_density_ratio, ratio);
        const double f = ratio - 1.0;
        if (!first && ((prev_f < 0.0 && f >= 0.0) || (prev_f > 0.0 && f <= 0.0))) {
            crossings.push_back(prev_t + (snap.t - prev_t) * prev_f / (prev_f - f));
        }
        if (f != 0.0 || first) {
            prev_f = f;
            prev_t = snap.t;
        }
        first = false;
    }
    if (crossings.size() >= 2) {
        const double mean_gap = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
        m.period = 2.0 * mean_gap;
    }
    return m;
}

}  // namespace pfs
