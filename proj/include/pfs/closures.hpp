#pragma once

// Constitutive layer of the mixed model: the state indicator, the mixed
// pressure law, sound speeds, total head and the entropy pair.

#include <cstdint>
#include <limits>
#include <stdexcept>

#include "pfs/geometry.hpp"

namespace pfs {

class ClosureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FluidConstants {
    double rho0 = 1000.0;     ///< reference density [kg/m^3]
    double beta0 = 5.0e-10;   ///< compressibility [m^2/N]
    double g = 9.81;          ///< gravity [m/s^2]
    double Ks = std::numeric_limits<double>::infinity();  ///< Strickler [m^(1/3)/s]; inf = frictionless

    /// Acoustic wave speed 1/sqrt(beta0 rho0).
    double sound_speed() const;
    /// Throws ClosureError unless every constant is strictly positive.
    void validate() const;

    bool operator==(const FluidConstants&) const = default;
};

/// State indicator: free surface (rho = rho0) or pressurized.
enum class Regime : std::uint8_t { FreeSurface = 0, Pressurized = 1 };

inline int indicator(Regime e) { return static_cast<int>(e); }

struct FlowState {
    double A = 0.0;  ///< equivalent wet area [m^2]
    double Q = 0.0;  ///< discharge [m^3/s]
    Regime E = Regime::FreeSurface;

    double velocity() const { return Q / A; }
    bool operator==(const FlowState&) const = default;
};

/// Physical wet area: S when pressurized, A otherwise. A free-surface state
/// with A > S is inconsistent and rejected.
double physical_wet_area(double A, Regime E, double S);

/// Free-surface level for E = 0, crown (R) for E = 1.
double water_level(double A, Regime E, const CellGeometry& cell);

/// rho / rho0 = A / physical wet area.
double density_ratio(double A, Regime E, double S);

/// Mixed pressure law c^2 (A - Sp) + g I1(Sp) cos(theta), per unit density.
double pressure(double A, Regime E, const CellGeometry& cell, const FluidConstants& consts);

double sound_speed(double A, Regime E, const CellGeometry& cell, const FluidConstants& consts);

struct Eigenvalues {
    double minus;
    double plus;
};

Eigenvalues eigenvalues(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

double total_head(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// Mathematical entropy; continuous across A = S because of the c^2 S term.
double entropy(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// (entropy + p) u
double entropy_flux(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

/// All closure quantities of one state, from a single area inversion.
struct ClosureValues {
    double physical_area;
    double level;
    double i1;
    double top_width;  ///< 0 for pressurized states
    double wetted_perimeter;
    double pressure;
};

ClosureValues evaluate_closure(const FlowState& state, const CellGeometry& cell, const FluidConstants& consts);

}  // namespace pfs
