#include "pfs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <numbers>
#include <sstream>

#include "pfs/quadrature.hpp"

namespace pfs {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Circular segment area over R^2 for half-angle a: a - sin(a)cos(a).
double segment_area(double a) {
    const double y = 2.0 * a;
    if (y < 0.5) {
        // y - sin(y), expanded to keep relative precision near the invert/crown.
        const double y2 = y * y;
        double term = y * y2 / 6.0;
        double sum = term;
        for (int k = 5; k <= 17; k += 2) {
            term *= -y2 / (static_cast<double>(k - 1) * k);
            sum += term;
        }
        return 0.5 * sum;
    }
    return 0.5 * (y - std::sin(y));
}

// sin(a) - a cos(a)
double moment_kernel(double a) {
    if (a < 0.3) {
        const double a2 = a * a;
        return a * a2 *
               (1.0 / 3 + a2 * (-1.0 / 30 + a2 * (1.0 / 840 + a2 * (-1.0 / 45360 + a2 * (1.0 / 3991680 +
                                                                                        a2 * (-1.0 / 518918400))))));
    }
    return std::sin(a) - a * std::cos(a);
}

// sin(a) - a cos(a) - sin^3(a)/3
double hydrostatic_kernel(double a) {
    if (a < 0.3) {
        const double a2 = a * a;
        return a2 * a2 * a *
               (2.0 / 15 + a2 * (-11.0 / 315 + a2 * (17.0 / 3780 + a2 * (-461.0 / 1247400 +
                                                                           a2 * (8303.0 / 389188800)))));
    }
    const double s = std::sin(a);
    return s - a * std::cos(a) - s * s * s / 3.0;
}

// Angular position of a level in a circle of radius R. `alpha` is the
// half-angle measured from the invert; near the crown the complement
// `psi = pi - alpha` is kept separately for precision.
struct CircleAngle {
    bool upper;
    double alpha;
    double psi;
    double sin_alpha;
};

CircleAngle angle_of_level(double level, double R) {
    const double r = std::clamp(level / R, -1.0, 1.0);
    if (r <= 0.0) {
        const double alpha = std::acos(-r);
        return {false, alpha, kPi - alpha, std::sin(alpha)};
    }
    const double psi = std::acos(r);
    return {true, kPi - psi, psi, std::sin(psi)};
}

// Solves segment_area(a) = target for a in [0, pi/2].
double invert_segment(double target) {
    if (target <= 0.0) {
        return 0.0;
    }
    const double half = kPi / 2.0;
    if (target >= segment_area(half)) {
        return half;
    }
    double lo = 0.0;
    double hi = half;
    double a = std::min(std::cbrt(1.5 * target), half);
    for (int it = 0; it < 100; ++it) {
        const double f = segment_area(a) - target;
        if (f > 0.0) {
            hi = a;
        } else {
            lo = a;
        }
        const double s = std::sin(a);
        const double df = 2.0 * s * s;
        double next = df > 0.0 ? a - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - a) <= 1e-16 * (1.0 + a) || hi - lo <= 1e-16 * half) {
            return next;
        }
        a = next;
    }
    return a;
}

CircleAngle angle_of_area(double area, double R) {
    const double R2 = R * R;
    const double S = kPi * R2;
    if (area <= 0.5 * S) {
        const double alpha = invert_segment(area / R2);
        return {false, alpha, kPi - alpha, std::sin(alpha)};
    }
    const double psi = invert_segment((S - area) / R2);
    return {true, kPi - psi, psi, std::sin(psi)};
}

double level_of_angle(const CircleAngle& a, double R) {
    return a.upper ? R * std::cos(a.psi) : -R * std::cos(a.alpha);
}

double area_of_angle(const CircleAngle& a, double R) {
    const double R2 = R * R;
    return a.upper ? kPi * R2 - R2 * segment_area(a.psi) : R2 * segment_area(a.alpha);
}

double i1_of_angle(const CircleAngle& a, double R, double level, double area) {
    if (!a.upper) {
        return R * R * R * hydrostatic_kernel(a.alpha);
    }
    return level * area + (2.0 / 3.0) * R * R * R * a.sin_alpha * a.sin_alpha * a.sin_alpha;
}

}  // namespace

// ---------------------------------------------------------------------------
// Section (quadrature route)
// ---------------------------------------------------------------------------

void Section::check_level(double level) const {
    const double H = half_height();
    if (!std::isfinite(level) || level < -H || level > H) {
        throw GeometryError("level " + fmt_double(level) + " outside section [-" + fmt_double(H) +
                            ", " + fmt_double(H) + "]");
    }
}

void Section::check_area(double area) const {
    const double S = full_area();
    if (!std::isfinite(area) || area < 0.0 || area > S) {
        throw GeometryError("wet area " + fmt_double(area) + " outside [0, " + fmt_double(S) + "]");
    }
}

double Section::quad_wet_area(double level) const {
    check_level(level);
    const double H = half_height();
    const double t1 = std::asin(std::clamp(level / H, -1.0, 1.0));
    return quadrature::integrate(
        [&](double t) { return sigma(H * std::sin(t)) * H * std::cos(t); }, -kPi / 2.0, t1);
}

double Section::quad_full_area() const { return quad_wet_area(half_height()); }

double Section::quad_i1(double level) const {
    check_level(level);
    const double H = half_height();
    const double t1 = std::asin(std::clamp(level / H, -1.0, 1.0));
    return quadrature::integrate(
        [&](double t) {
            const double z = H * std::sin(t);
            return (level - z) * sigma(z) * H * std::cos(t);
        },
        -kPi / 2.0, t1);
}

double Section::quad_i2(double level) const {
    check_level(level);
    const double H = half_height();
    const double t1 = std::asin(std::clamp(level / H, -1.0, 1.0));
    // z = H sin(t) absorbs the 1/sqrt(H - |z|) growth of the width rate.
    return quadrature::integrate(
        [&](double t) {
            const double z = H * std::sin(t);
            return (level - z) * substituted_sigma_rate(t);
        },
        -kPi / 2.0, t1);
}

double Section::substituted_sigma_rate(double t) const {
    const double H = half_height();
    return sigma_rate(H * std::sin(t)) * H * std::cos(t);
}

double Section::quad_level_from_area(double area) const {
    const double S = quad_full_area();
    if (!std::isfinite(area) || area < 0.0 || area > S) {
        throw GeometryError("wet area " + fmt_double(area) + " outside [0, " + fmt_double(S) + "]");
    }
    const double H = half_height();
    double lo = -H;
    double hi = H;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * H; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (quad_wet_area(mid) < area) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double Section::top_width(double area) const {
    if (!(area > 0.0)) {
        throw GeometryError("top width needs a positive wet area, got " + fmt_double(area));
    }
    return sigma(level_from_area(area));
}

double Section::zbar(double physical_area, double level) const {
    if (!(physical_area > 0.0)) {
        throw GeometryError("centroid needs a positive wet area, got " + fmt_double(physical_area));
    }
    return level - i1(level) / physical_area;
}

// ---------------------------------------------------------------------------
// CircularSection (closed forms)
// ---------------------------------------------------------------------------

CircularSection::CircularSection(double radius, double radius_rate)
    : radius_(radius), radius_rate_(radius_rate) {
    if (!(radius > 0.0) || !std::isfinite(radius) || !std::isfinite(radius_rate)) {
        throw GeometryError("circular section needs a finite positive radius, got " + fmt_double(radius));
    }
}

double CircularSection::sigma(double z) const {
    if (!(std::abs(z) <= radius_)) {
        throw GeometryError("z = " + fmt_double(z) + " outside circular section of radius " +
                            fmt_double(radius_));
    }
    return 2.0 * std::sqrt((radius_ - z) * (radius_ + z));
}

double CircularSection::sigma_rate(double z) const {
    return 2.0 * radius_ * radius_rate_ / std::sqrt((radius_ - z) * (radius_ + z));
}

double CircularSection::substituted_sigma_rate(double /*t*/) const {
    return 2.0 * radius_ * radius_rate_;
}

double CircularSection::wetted_perimeter(double level) const {
    check_level(level);
    return 2.0 * radius_ * angle_of_level(level, radius_).alpha;
}

double CircularSection::full_area() const { return kPi * (radius_ * radius_); }

double CircularSection::wet_area(double level) const {
    check_level(level);
    return area_of_angle(angle_of_level(level, radius_), radius_);
}

double CircularSection::level_from_area(double area) const {
    check_area(area);
    return level_of_angle(angle_of_area(area, radius_), radius_);
}

double CircularSection::i1(double level) const {
    check_level(level);
    const CircleAngle a = angle_of_level(level, radius_);
    return i1_of_angle(a, radius_, level, area_of_angle(a, radius_));
}

double CircularSection::i2(double level) const {
    check_level(level);
    if (radius_rate_ == 0.0) {
        return 0.0;
    }
    const CircleAngle a = angle_of_level(level, radius_);
    const double R = radius_;
    // R * (h*alpha/R + sin(alpha)) with h = -R cos(alpha) below the axis.
    const double bracket = a.upper ? level * a.alpha + R * a.sin_alpha : R * moment_kernel(a.alpha);
    return 2.0 * R * radius_rate_ * bracket;
}

CircularSection::WetSection CircularSection::wet_section(double area) const {
    check_area(area);
    const CircleAngle a = angle_of_area(area, radius_);
    const double level = level_of_angle(a, radius_);
    return {level, 2.0 * radius_ * a.sin_alpha, i1_of_angle(a, radius_, level, area),
            2.0 * radius_ * a.alpha};
}

// ---------------------------------------------------------------------------
// RectangularSection
// ---------------------------------------------------------------------------

RectangularSection::RectangularSection(double width, double half_height, double width_rate)
    : width_(width), half_height_(half_height), width_rate_(width_rate) {
    if (!(width > 0.0) || !(half_height > 0.0)) {
        throw GeometryError("rectangular section needs positive width and height");
    }
}

double RectangularSection::sigma(double z) const {
    if (!(std::abs(z) <= half_height_)) {
        throw GeometryError("z = " + fmt_double(z) + " outside rectangular section");
    }
    return width_;
}

double RectangularSection::sigma_rate(double /*z*/) const { return width_rate_; }

double RectangularSection::wetted_perimeter(double level) const {
    check_level(level);
    return width_ + 2.0 * (level + half_height_);
}

// ---------------------------------------------------------------------------
// PipeProfile
// ---------------------------------------------------------------------------

namespace {

double arc_length_density(const MonotoneCubic& elevation, double x) {
    const double s = elevation.derivative(x);
    return std::sqrt(1.0 + s * s);
}

// Circumradius of three points; infinity when collinear.
double circumradius(const ProfileSample& p0, const ProfileSample& p1, const ProfileSample& p2) {
    const double ax = p1.x - p0.x, ay = p1.b - p0.b;
    const double bx = p2.x - p1.x, by = p2.b - p1.b;
    const double cx = p2.x - p0.x, cy = p2.b - p0.b;
    const double cross = ax * cy - ay * cx;
    if (cross == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double la = std::hypot(ax, ay), lb = std::hypot(bx, by), lc = std::hypot(cx, cy);
    return la * lb * lc / (2.0 * std::abs(cross));
}

}  // namespace

PipeProfile build_profile(std::vector<ProfileSample> samples, std::size_t resolution) {
    if (samples.size() < 2) {
        throw ProfileError("pipe profile needs at least 2 samples, got " + std::to_string(samples.size()));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.x) || !std::isfinite(s.b) || !std::isfinite(s.R)) {
            throw ProfileError("non-finite value in profile sample " + std::to_string(i), i);
        }
        if (!(s.R > 0.0)) {
            throw ProfileError("radius must be positive at sample " + std::to_string(i), i);
        }
        if (i > 0 && !(s.x > samples[i - 1].x)) {
            throw ProfileError("x must be strictly increasing at sample " + std::to_string(i), i);
        }
    }
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const double rc = circumradius(samples[i - 1], samples[i], samples[i + 1]);
        if (!(rc > samples[i].R)) {
            throw ProfileError("axis curvature radius " + fmt_double(rc) +
                                   " does not exceed the section radius at sample " + std::to_string(i),
                               i);
        }
    }

    std::vector<double> xs, bs, rs;
    for (const auto& s : samples) {
        xs.push_back(s.x);
        bs.push_back(s.b);
        rs.push_back(s.R);
    }

    PipeProfile p;
    p.elevation_ = MonotoneCubic(xs, bs);
    p.radius_ = MonotoneCubic(xs, rs);
    p.sample_X_.assign(samples.size(), 0.0);
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& elev = p.elevation_;
        p.sample_X_[k + 1] = p.sample_X_[k] +
                             quadrature::integrate([&](double x) { return arc_length_density(elev, x); },
                                                   xs[k], xs[k + 1]);
    }
    p.samples_ = std::move(samples);

    if (resolution > 0) {
        const double dX = p.length() / static_cast<double>(resolution);
        p.table_.reserve(resolution);
        for (std::size_t i = 0; i < resolution; ++i) {
            p.table_.push_back(p.station((static_cast<double>(i) + 0.5) * dX));
        }
    }
    return p;
}

double PipeProfile::X_of_x(double x) const {
    const double x0 = samples_.front().x;
    const double x1 = samples_.back().x;
    if (!(x >= x0 && x <= x1)) {
        throw GeometryError("x = " + fmt_double(x) + " outside profile [" + fmt_double(x0) + ", " +
                            fmt_double(x1) + "]");
    }
    auto it = std::upper_bound(samples_.begin(), samples_.end(), x,
                               [](double v, const ProfileSample& s) { return v < s.x; });
    std::size_t k = static_cast<std::size_t>(it - samples_.begin());
    k = std::min(k == 0 ? 0 : k - 1, samples_.size() - 2);
    return sample_X_[k] + quadrature::integrate(
                              [&](double s) { return arc_length_density(elevation_, s); },
                              samples_[k].x, x);
}

double PipeProfile::x_of_X(double X) const {
    const double L = length();
    const double slack = 1e-12 * std::max(1.0, L);
    if (!(X >= -slack && X <= L + slack)) {
        throw GeometryError("X = " + fmt_double(X) + " outside profile [0, " + fmt_double(L) + "]");
    }
    X = std::clamp(X, 0.0, L);
    auto it = std::upper_bound(sample_X_.begin(), sample_X_.end(), X);
    std::size_t k = static_cast<std::size_t>(it - sample_X_.begin());
    k = std::min(k == 0 ? 0 : k - 1, samples_.size() - 2);

    double lo = samples_[k].x;
    double hi = samples_[k + 1].x;
    if (X <= sample_X_[k]) {
        return lo;
    }
    if (X >= sample_X_[k + 1]) {
        return hi;
    }
    double x = lo + (hi - lo) * (X - sample_X_[k]) / (sample_X_[k + 1] - sample_X_[k]);
    for (int it_n = 0; it_n < 60; ++it_n) {
        const double f =
            sample_X_[k] +
            quadrature::integrate([&](double s) { return arc_length_density(elevation_, s); }, samples_[k].x, x) -
            X;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        double next = x - f / arc_length_density(elevation_, x);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
            return next;
        }
        x = next;
    }
    return x;
}

Station PipeProfile::station(double X) const {
    const double x = x_of_X(X);
    const double slope = elevation_.derivative(x);
    const double curv = elevation_.second_derivative(x);
    const double cos_t = 1.0 / std::sqrt(1.0 + slope * slope);
    const double cos2 = cos_t * cos_t;

    Station st{};
    st.X = X;
    st.x = x;
    st.Z = elevation_.value(x);
    st.R = radius_.value(x);
    st.dRdX = radius_.derivative(x) * cos_t;
    st.theta = std::atan(slope);
    st.sin_theta = slope * cos_t;
    st.cos_theta = cos_t;
    st.dcos_theta_dX = -slope * curv * cos2 * cos2;
    st.dZdX = st.sin_theta;
    return st;
}

CircularSection PipeProfile::section(double X) const {
    const Station st = station(X);
    return CircularSection(st.R, st.dRdX);
}

// ---------------------------------------------------------------------------
// Profile tables
// ---------------------------------------------------------------------------

std::vector<ProfileSample> read_profile_table(std::istream& in) {
    std::vector<ProfileSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream row(line);
        std::vector<double> values;
        std::string token;
        while (row >> token) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw GeometryError("profile table line " + std::to_string(lineno) + ": bad number '" +
                                    token + "'");
            }
            values.push_back(v);
        }
        if (values.empty()) {
            continue;
        }
        if (values.size() != 3) {
            throw GeometryError("profile table line " + std::to_string(lineno) + ": expected 3 columns 'x b R', got " +
                                std::to_string(values.size()));
        }
        out.push_back({values[0], values[1], values[2]});
    }
    return out;
}

std::vector<ProfileSample> load_profile_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw GeometryError("cannot open profile table '" + path + "'");
    }
    return read_profile_table(in);
}

// ---------------------------------------------------------------------------
// Cells and profile-level operations
// ---------------------------------------------------------------------------

CellGeometry cell_geometry(const Station& st) {
    CellGeometry g;
    g.R = st.R;
    g.dRdX = st.dRdX;
    g.S = kPi * (st.R * st.R);
    g.dSdX = 2.0 * kPi * st.R * st.dRdX;
    g.sin_theta = st.sin_theta;
    g.cos_theta = st.cos_theta;
    g.dcos_theta_dX = st.dcos_theta_dX;
    g.dZdX = st.dZdX;
    g.X_center = st.X;
    g.Z = st.Z;
    return g;
}

CellGeometry uniform_cell(double radius, double X_center) {
    CellGeometry g;
    g.R = radius;
    g.S = kPi * (radius * radius);
    g.X_center = X_center;
    return g;
}

double sigma(const PipeProfile& profile, double X, double z) { return profile.section(X).sigma(z); }

double full_area(const PipeProfile& profile, double X) { return profile.section(X).full_area(); }

double wet_area(const PipeProfile& profile, double X, double level) {
    return profile.section(X).wet_area(level);
}

double level_from_area(const PipeProfile& profile, double X, double area) {
    return profile.section(X).level_from_area(area);
}

double top_width(const PipeProfile& profile, double X, double area) {
    return profile.section(X).top_width(area);
}

double i1(const PipeProfile& profile, double X, double level) { return profile.section(X).i1(level); }

double i2(const PipeProfile& profile, double X, double level) { return profile.section(X).i2(level); }

double zbar(const PipeProfile& profile, double X, double physical_area, double level) {
    return profile.section(X).zbar(physical_area, level);
}

HydraulicRadius hydraulic_radius(const Section& section, double physical_area) {
    if (!(physical_area > 0.0)) {
        throw GeometryError("hydraulic radius needs a positive wet area, got " + fmt_double(physical_area));
    }
    const double S = section.full_area();
    const double level =
        physical_area >= S ? section.half_height() : section.level_from_area(physical_area);
    const double P = section.wetted_perimeter(level);
    return {P, physical_area / P};
}

HydraulicRadius hydraulic_radius(const PipeProfile& profile, double X, double physical_area) {
    return hydraulic_radius(profile.section(X), physical_area);
}

}  // namespace pfs
