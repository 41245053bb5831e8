#include "pfs/sources.hpp"

#include <cmath>

namespace pfs {

namespace {

double friction_coefficient_from(const ClosureValues& v, const FluidConstants& consts) {
    if (std::isinf(consts.Ks)) {
        return 0.0;
    }
    const double Rh = v.physical_area / v.wetted_perimeter;
    return 1.0 / (consts.Ks * consts.Ks * std::pow(Rh, 4.0 / 3.0));
}

}  // namespace

double slope_term(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    return -consts.g * state.A * cell.dZdX;
}

double pressure_source(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    return source_terms(state, cell, consts).pressure_source;
}

double curvature_term(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    return source_terms(state, cell, consts).curvature;
}

double friction_coefficient(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    if (std::isinf(consts.Ks)) {
        return 0.0;
    }
    return friction_coefficient_from(evaluate_closure(state, cell, consts), consts);
}

double friction_term(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    return consts.g * friction_coefficient(state, cell, consts) * state.Q * std::abs(state.Q) / state.A;
}

SourceBreakdown source_terms(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts) {
    return source_terms(state, cell, consts, evaluate_closure(state, cell, consts));
}

SourceBreakdown source_terms(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts,
                             const ClosureValues& v) {
    const double c = consts.sound_speed();
    const double A = state.A;
    SourceBreakdown s;
    s.slope = -consts.g * A * cell.dZdX;

    // the acoustic part vanishes identically in free-surface cells (Sp = A)
    const double acoustic = state.E == Regime::Pressurized ? c * c * (A / v.physical_area - 1.0) * cell.dSdX : 0.0;
    const double i2 = cell.dRdX == 0.0 ? 0.0 : cell.section().i2(v.level);
    s.pressure_source = acoustic + consts.g * i2 * cell.cos_theta;

    const double zbar = v.level - v.i1 / v.physical_area;
    s.curvature = cell.dcos_theta_dX == 0.0 ? 0.0 : consts.g * A * zbar * cell.dcos_theta_dX;

    s.friction = consts.g * friction_coefficient_from(v, consts) * state.Q * std::abs(state.Q) / A;
    s.total = s.slope + s.pressure_source - s.curvature - s.friction;
    return s;
}

}  // namespace pfs
