#pragma once

#include "pfs/closures.hpp"

namespace pfs {

/// Momentum right-hand side, split by origin. All terms in m^3/s^2;
/// total = slope + pressure_source - curvature - friction.
struct SourceBreakdown {
    double slope = 0.0;
    double pressure_source = 0.0;
    double curvature = 0.0;
    double friction = 0.0;
    double total = 0.0;
};

/// -g A dZ/dX
double slope_term(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// c^2 (A/Sp - 1) dS/dX + g I2(level) cos(theta)
double pressure_source(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// g A zbar d(cos theta)/dX
double curvature_term(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// Manning-Strickler coefficient 1 / (Ks^2 Rh^(4/3)) on the physical wet
/// area; zero when Ks is infinite.
double friction_coefficient(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// g K Q|Q| / A
double friction_term(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

SourceBreakdown source_terms(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// Same as source_terms with closure values already at hand.
SourceBreakdown source_terms(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts,
                             const ClosureValues& closure);

}  // namespace pfs
