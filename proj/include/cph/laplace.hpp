#pragma once

#include <functional>

#include "cph/poly.hpp"

namespace cph {

/// Euler-summation inversion of the Fourier series (Abate-Whitt).
struct EulerParams {
    int terms = 18;
    int averages = 11;
    /// Discretisation parameter; error is about exp(-a).
    double a = 18.420680743952367;  // 8 ln 10
};

/// f(t) from its Laplace transform F.
double laplace_invert_numeric(const std::function<cplx(cplx)>& F, double t, const EulerParams& params = {});

}  // namespace cph
