#pragma once

#include <vector>

#include "cph/poly.hpp"

namespace cph {

/// One term c * t^n * exp(-r t).
struct ExpTerm {
    cplx c;
    int n = 0;
    cplx r;
};

/// Measure on [0, inf): a point mass at 0 plus the density sum c t^n e^{-r t}.
/// Complex terms are kept as explicit conjugate pairs.
class ExpPolyMix {
public:
    std::vector<ExpTerm> terms;
    cplx atom0 = 0.0;

    static ExpPolyMix point_mass(cplx mass = 1.0);
    static ExpPolyMix exponential(cplx rate);
    /// Erlang(k, rate) density rate^k t^{k-1} e^{-rate t} / (k-1)!
    static ExpPolyMix erlang(int k, cplx rate);

    cplx density(double t) const;
    /// Mass on (t, inf); excludes the atom for t >= 0.
    cplx tail(double t) const;
    /// integral_t^inf e^{-s (y - t)} density(y) dy
    cplx interval(double t, cplx s) const;
    /// Total mass, atom included.
    cplx mass() const;
    /// Laplace-Stieltjes transform atom0 + sum c n! / (s + r)^{n+1}.
    cplx lst(cplx s) const;

    /// Real part of tail(t); throws if the imaginary part is not negligible.
    double tail_real(double t) const;
    /// Largest |Im f(t)| / max(|f(t)|, floor) over a grid.
    double max_imag_ratio(const std::vector<double>& grid) const;

    ExpPolyMix& operator+=(const ExpPolyMix& o);
    ExpPolyMix& operator*=(cplx k);
    friend ExpPolyMix operator+(ExpPolyMix a, const ExpPolyMix& b) { return a += b; }
    friend ExpPolyMix operator*(ExpPolyMix a, cplx k) { return a *= k; }
    friend ExpPolyMix operator*(cplx k, ExpPolyMix a) { return a *= k; }

    /// Merge terms sharing (n, r) up to a relative tolerance.
    void compact(double rel_tol = 1e-12);
};

/// Measure whose transform is num/den; a constant polynomial part becomes atom0.
ExpPolyMix invert_rational(const Poly& num, const Poly& den);
/// Same with the denominator supplied by its clustered roots and leading coefficient.
ExpPolyMix invert_rational(const Poly& num, const std::vector<Root>& den_roots, cplx lead = 1.0);

/// Convolution of two measures (atoms included).
ExpPolyMix convolve(const ExpPolyMix& a, const ExpPolyMix& b);

}  // namespace cph
