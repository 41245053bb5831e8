#include "pfs/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pfs::quadrature {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    if (a == b) {
        return 0.0;
    }
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    double error = 0.0;
    return Rule::integrate(f, a, b, 20, rel_tol, &error);
}

}  // namespace pfs::quadrature
