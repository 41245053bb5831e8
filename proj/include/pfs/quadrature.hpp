#pragma once

#include <functional>

namespace pfs::quadrature {

/// Relative tolerance used for every section integral.
inline constexpr double kRelativeTolerance = 1e-12;

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b].
/// Returns 0 when a == b.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = kRelativeTolerance);

}  // namespace pfs::quadrature
