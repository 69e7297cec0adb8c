#pragma once

#include <vector>

#include "cph/exppoly.hpp"
#include "cph/poly.hpp"

namespace cph {

/// Phase-type service transform q(s)/p(s), p monic of degree M, deg q < M.
class RationalLst {
public:
    RationalLst() = default;
    /// Normalises p to monic and validates; throws InvalidService.
    RationalLst(Poly q, Poly p);

    static RationalLst exponential(double rate);
    static RationalLst erlang(int k, double rate);

    const Poly& q() const { return q_; }
    const Poly& p() const { return p_; }
    int order() const { return p_.degree(); }
    double mean() const { return mean_; }

    cplx lst(cplx s) const { return q_(s) / p_(s); }
    cplx lst_derivative(cplx s) const;
    /// (1 - lst(s)) / (mean s)
    cplx excess_lst(cplx s) const;

    /// Service-time measure (density, plus an atom if deg q == M).
    const ExpPolyMix& service() const { return service_; }
    /// Stationary-excess density.
    const ExpPolyMix& excess() const { return excess_; }
    const std::vector<Root>& poles() const { return poles_; }

private:
    Poly q_, p_;
    Poly excess_num_;
    double mean_ = 0.0;
    std::vector<Root> poles_;
    ExpPolyMix service_, excess_;
};

}  // namespace cph
