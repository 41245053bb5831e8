#include "pfs/closures.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pfs {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_positive_area(double A) {
    if (!(A > 0.0) || !std::isfinite(A)) {
        throw ClosureError("wet area must be finite and positive, got " + num(A));
    }
}

}  // namespace

double FluidConstants::sound_speed() const { return 1.0 / std::sqrt(beta0 * rho0); }

void FluidConstants::validate() const {
    if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
        throw ClosureError("rho0 must be positive");
    }
    if (!(beta0 > 0.0) || !std::isfinite(beta0)) {
        throw ClosureError("beta0 must be positive");
    }
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw ClosureError("g must be positive");
    }
    if (!(Ks > 0.0)) {
        throw ClosureError("Strickler coefficient must be positive");
    }
}

double physical_wet_area(double A, Regime E, double S) {
    require_positive_area(A);
    if (!(S > 0.0)) {
        throw ClosureError("section area must be positive, got " + num(S));
    }
    if (E == Regime::Pressurized) {
        return S;
    }
    if (A > S) {
        throw ClosureError("free-surface state with A = " + num(A) + " above the full section S = " + num(S));
    }
    return A;
}

double water_level(double A, Regime E, const CellGeometry& cell) {
    const double Sp = physical_wet_area(A, E, cell.S);
    if (E == Regime::Pressurized) {
        return cell.R;
    }
    return cell.section().level_from_area(Sp);
}

double density_ratio(double A, Regime E, double S) { return A / physical_wet_area(A, E, S); }

ClosureValues evaluate_closure(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    const double c = consts.sound_speed();
    const double Sp = physical_wet_area(state.A, state.E, cell.S);
    ClosureValues v{};
    v.physical_area = Sp;
    if (state.E == Regime::Pressurized) {
        v.level = cell.R;
        v.i1 = cell.R * cell.S;
        v.top_width = 0.0;
        v.wetted_perimeter = 2.0 * std::numbers::pi * cell.R;
    } else {
        const auto wet = cell.section().wet_section(Sp);
        v.level = wet.level;
        v.i1 = wet.i1;
        v.top_width = wet.top_width;
        v.wetted_perimeter = wet.wetted_perimeter;
    }
    v.pressure = c * c * (state.A - Sp) + consts.g * v.i1 * cell.cos_theta;
    return v;
}

double pressure(double A, Regime E, const CellGeometry& cell, const FluidConstants& consts) {
    return evaluate_closure({A, 0.0, E}, cell, consts).pressure;
}

double sound_speed(double A, Regime E, const CellGeometry& cell, const FluidConstants& consts) {
    require_positive_area(A);
    if (E == Regime::Pressurized) {
        return consts.sound_speed();
    }
    const auto v = evaluate_closure({A, 0.0, E}, cell, consts);
    if (!(v.top_width > 0.0)) {
        throw ClosureError("free-surface sound speed undefined for a full section (A = " + num(A) + ")");
    }
    return std::sqrt(consts.g * A / v.top_width * cell.cos_theta);
}

Eigenvalues eigenvalues(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    const double c = sound_speed(state.A, state.E, cell, consts);
    const double u = state.velocity();
    return {u - c, u + c};
}

double total_head(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    const auto v = evaluate_closure(state, cell, consts);
    const double c = consts.sound_speed();
    const double u = state.velocity();
    const double log_term = state.E == Regime::Pressurized ? c * c * std::log(state.A / v.physical_area) : 0.0;
    return 0.5 * u * u + log_term + consts.g * v.level * cell.cos_theta + consts.g * cell.Z;
}

double entropy(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    const auto v = evaluate_closure(state, cell, consts);
    const double c2 = consts.sound_speed() * consts.sound_speed();
    const double A = state.A;
    const double log_term = state.E == Regime::Pressurized ? c2 * A * std::log(A / v.physical_area) : 0.0;
    const double zbar = v.level - v.i1 / v.physical_area;
    return state.Q * state.Q / (2.0 * A) + log_term + c2 * cell.S + consts.g * A * zbar * cell.cos_theta +
           consts.g * A * cell.Z;
}

double entropy_flux(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    const double p = evaluate_closure(state, cell, consts).pressure;
    return (entropy(state, cell, consts) + p) * state.velocity();
}

}  // namespace pfs
