#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cph/error.hpp"

namespace cph {

/// Adaptive Gauss-Kronrod (15 point) integral of f over [a, b]; b may be +inf.
/// Throws QuadratureFailure when the error estimate misses tolerance.
template <class F>
auto integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 1e-13) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0, l1 = 0.0;
    auto val = gauss_kronrod<double, 15>::integrate(f, a, b, 25, rel_tol, &err, &l1);
    if (!(err <= std::max(abs_tol, 10.0 * rel_tol * l1))) {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] error " << err << " exceeds tolerance";
        throw Error(Errc::QuadratureFailure, os.str());
    }
    return val;
}

}  // namespace cph
