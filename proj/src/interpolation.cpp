#include "pfs/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfs {

namespace {

double edge_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (std::signbit(m) != std::signbit(d0) || d0 == 0.0) {
        return 0.0;
    }
    if (std::signbit(d0) != std::signbit(d1) && std::abs(m) > 3.0 * std::abs(d0)) {
        return 3.0 * d0;
    }
    return m;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw std::invalid_argument("MonotoneCubic: need at least two (x, y) pairs");
    }
    std::vector<double> h(n - 1);
    std::vector<double> delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        if (!(h[k] > 0.0)) {
            throw std::invalid_argument("MonotoneCubic: abscissae must be strictly increasing");
        }
        delta[k] = (y_[k + 1] - y_[k]) / h[k];
    }

    slope_.assign(n, 0.0);
    if (n == 2) {
        slope_[0] = slope_[1] = delta[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double d0 = delta[k - 1];
        const double d1 = delta[k];
        if (d0 * d1 <= 0.0) {
            slope_[k] = 0.0;
            continue;
        }
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        slope_[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
    slope_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    slope_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(k, x_.size() - 2);
}

double MonotoneCubic::value(double x) const {
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * slope_[k] +
           (-2 * t3 + 3 * t2) * y_[k + 1] + (t3 - t2) * h * slope_[k + 1];
}

double MonotoneCubic::derivative(double x) const {
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[k] + (-6 * t2 + 6 * t) * y_[k + 1]) / h +
           (3 * t2 - 4 * t + 1) * slope_[k] + (3 * t2 - 2 * t) * slope_[k + 1];
}

double MonotoneCubic::second_derivative(double x) const {
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    return ((12 * t - 6) * y_[k] + (-12 * t + 6) * y_[k + 1]) / (h * h) +
           ((6 * t - 4) * slope_[k] + (6 * t - 2) * slope_[k + 1]) / h;
}

}  // namespace pfs
