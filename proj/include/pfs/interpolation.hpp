#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pfs {

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes
/// (shape preserving, C1). Linear data is reproduced exactly.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::span<const double> x, std::span<const double> y);

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slope_;
};

}  // namespace pfs
