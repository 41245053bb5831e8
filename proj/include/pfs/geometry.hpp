#pragma once

// Pipe axis, circular cross-sections and the section integrals used by the
// mixed free-surface / pressurized model.
//
// Vertical coordinates inside a section are measured from the pipe axis:
// z = -R is the invert, z = +R the crown. A "level" h is the z-coordinate of
// the free surface in that frame.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfs/interpolation.hpp"

namespace pfs {

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rejected pipe description; `sample_index` points at the offending row
/// when the failure is tied to one.
class ProfileError : public GeometryError {
public:
    ProfileError(const std::string& what, std::optional<std::size_t> sample_index = {})
        : GeometryError(what), sample_index_(sample_index) {}

    std::optional<std::size_t> sample_index() const { return sample_index_; }

private:
    std::optional<std::size_t> sample_index_;
};

// ---------------------------------------------------------------------------
// Cross sections
// ---------------------------------------------------------------------------

/// A cross-section spanning z in [-half_height, half_height] with width
/// sigma(z). The base class evaluates every integral by adaptive quadrature;
/// concrete sections may override with closed forms. The quad_* members are
/// always the quadrature route, so both can be compared.
class Section {
public:
    virtual ~Section() = default;

    virtual double half_height() const = 0;
    virtual double sigma(double z) const = 0;
    /// Axial derivative of the width at fixed z.
    virtual double sigma_rate(double z) const = 0;
    /// sigma_rate(H sin t) * H cos t, the I2 integrand weight after the
    /// substitution z = H sin t. Sections with endpoint singularities
    /// override it with the cancelled form.
    virtual double substituted_sigma_rate(double t) const;
    virtual double wetted_perimeter(double level) const = 0;

    virtual double full_area() const { return quad_full_area(); }
    virtual double wet_area(double level) const { return quad_wet_area(level); }
    virtual double level_from_area(double area) const { return quad_level_from_area(area); }
    virtual double i1(double level) const { return quad_i1(level); }
    virtual double i2(double level) const { return quad_i2(level); }

    double top_width(double area) const;
    double zbar(double physical_area, double level) const;

    double quad_full_area() const;
    double quad_wet_area(double level) const;
    double quad_level_from_area(double area) const;
    double quad_i1(double level) const;
    double quad_i2(double level) const;

protected:
    void check_level(double level) const;
    void check_area(double area) const;
};

/// Circular section of radius R whose radius changes along the axis at
/// rate dR/dX.
class CircularSection final : public Section {
public:
    explicit CircularSection(double radius, double radius_rate = 0.0);

    double radius() const { return radius_; }
    double radius_rate() const { return radius_rate_; }

    double half_height() const override { return radius_; }
    double sigma(double z) const override;
    double sigma_rate(double z) const override;
    double substituted_sigma_rate(double t) const override;
    double wetted_perimeter(double level) const override;

    double full_area() const override;
    double wet_area(double level) const override;
    double level_from_area(double area) const override;
    double i1(double level) const override;
    double i2(double level) const override;

    /// Everything the free-surface closure needs from one inversion of A.
    struct WetSection {
        double level;
        double top_width;
        double i1;
        double wetted_perimeter;
    };
    WetSection wet_section(double area) const;

private:
    double radius_;
    double radius_rate_;
};

/// Rectangle of constant width; only the base-class quadrature is used.
class RectangularSection final : public Section {
public:
    RectangularSection(double width, double half_height, double width_rate = 0.0);

    double half_height() const override { return half_height_; }
    double sigma(double z) const override;
    double sigma_rate(double z) const override;
    double wetted_perimeter(double level) const override;

private:
    double width_;
    double half_height_;
    double width_rate_;
};

// ---------------------------------------------------------------------------
// Pipe profile
// ---------------------------------------------------------------------------

struct ProfileSample {
    double x;  ///< horizontal coordinate [m]
    double b;  ///< axis elevation [m]
    double R;  ///< section radius [m]

    bool operator==(const ProfileSample&) const = default;
};

/// Geometry of the pipe at one curvilinear abscissa X.
struct Station {
    double X;
    double x;
    double Z;  ///< axis elevation b(x)
    double R;
    double dRdX;
    double theta;
    double sin_theta;
    double cos_theta;
    double dcos_theta_dX;
    double dZdX;
};

class PipeProfile {
public:
    const std::vector<ProfileSample>& samples() const { return samples_; }
    /// Curvilinear abscissa of every sample; starts at 0.
    const std::vector<double>& sample_X() const { return sample_X_; }
    double length() const { return sample_X_.back(); }

    double X_of_x(double x) const;
    double x_of_X(double X) const;
    Station station(double X) const;

    /// Stations at the centres of `resolution` equal intervals in X.
    const std::vector<Station>& derivative_table() const { return table_; }

    CircularSection section(double X) const;

private:
    friend PipeProfile build_profile(std::vector<ProfileSample> samples, std::size_t resolution);

    std::vector<ProfileSample> samples_;
    std::vector<double> sample_X_;
    MonotoneCubic elevation_;
    MonotoneCubic radius_;
    std::vector<Station> table_;
};

/// Validates samples, builds the interpolants and the arc-length map.
/// Throws ProfileError on non-increasing x, R <= 0, or an axis whose
/// discrete curvature radius does not exceed the local section radius.
PipeProfile build_profile(std::vector<ProfileSample> samples, std::size_t resolution = 0);

/// Plain-text table: whitespace-separated `x b R` rows, `#` comments.
std::vector<ProfileSample> read_profile_table(std::istream& in);
std::vector<ProfileSample> load_profile_table(const std::string& path);

// ---------------------------------------------------------------------------
// Per-cell geometry
// ---------------------------------------------------------------------------

struct CellGeometry {
    double S = 0.0;
    double dSdX = 0.0;
    double sin_theta = 0.0;
    double cos_theta = 1.0;
    double dcos_theta_dX = 0.0;
    double dZdX = 0.0;
    double R = 0.0;
    double dRdX = 0.0;
    double X_center = 0.0;
    double Z = 0.0;

    CircularSection section() const { return CircularSection(R, dRdX); }
};

CellGeometry cell_geometry(const Station& station);
/// Horizontal straight circular pipe cell; convenient in tests.
CellGeometry uniform_cell(double radius, double X_center = 0.0);

// ---------------------------------------------------------------------------
// Section operations at a profile abscissa
// ---------------------------------------------------------------------------

struct HydraulicRadius {
    double wetted_perimeter;
    double radius;
};

double sigma(const PipeProfile& profile, double X, double z);
double full_area(const PipeProfile& profile, double X);
double wet_area(const PipeProfile& profile, double X, double level);
double level_from_area(const PipeProfile& profile, double X, double area);
double top_width(const PipeProfile& profile, double X, double area);
double i1(const PipeProfile& profile, double X, double level);
double i2(const PipeProfile& profile, double X, double level);
double zbar(const PipeProfile& profile, double X, double physical_area, double level);
HydraulicRadius hydraulic_radius(const PipeProfile& profile, double X, double physical_area);

/// Same as above for a bare section (no profile lookup).
HydraulicRadius hydraulic_radius(const Section& section, double physical_area);

}  // namespace pfs
