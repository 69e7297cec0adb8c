#include "cph/rational_lst.hpp"

#include <cmath>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

RationalLst::RationalLst(Poly q, Poly p) {
    if (p.degree() < 1) throw Error(Errc::InvalidService, "phase denominator must have degree >= 1");
    if (!p.is_real() || !q.is_real()) throw Error(Errc::InvalidService, "phase coefficients must be real");
    const cplx lead = p.leading();
    p_ = p * (1.0 / lead);
    q_ = q * (1.0 / lead);
    if (q_.degree() >= p_.degree()) throw Error(Errc::InvalidService, "phase numerator degree must be below denominator degree");
    if (std::abs(p_[0]) == 0.0) throw Error(Errc::InvalidService, "phase denominator vanishes at 0");
    const double at0 = (q_[0] / p_[0]).real();
    if (std::abs(at0 - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "phase transform at s=0 is " << at0 << ", expected 1";
        throw Error(Errc::InvalidService, os.str());
    }
    poles_ = roots_clustered(p_);
    for (const auto& r : poles_) {
        if (r.value.real() >= 0.0) throw Error(Errc::InvalidService, "phase denominator has a root with nonnegative real part");
        if (q_.degree() >= 0 && std::abs(q_(r.value)) <= 1e-10 * q_.eval_scale(r.value))
            throw Error(Errc::InvalidService, "phase numerator and denominator share a root");
    }
    mean_ = -lst_derivative(0.0).real();
    if (!(mean_ > 0.0)) throw Error(Errc::InvalidService, "phase mean must be positive");

    service_ = invert_rational(q_, poles_, 1.0);
    // (p - q)/s has an exact zero constant term removed.
    std::vector<cplx> d = (p_ - q_).coeffs();
    d.erase(d.begin());
    excess_num_ = Poly(std::move(d)) * (1.0 / mean_);
    excess_ = invert_rational(excess_num_, poles_, 1.0);
}

RationalLst RationalLst::exponential(double rate) { return {Poly{rate}, Poly{rate, 1.0}}; }

RationalLst RationalLst::erlang(int k, double rate) {
    return {Poly{std::pow(rate, k)}, Poly{rate, 1.0}.pow(k)};
}

cplx RationalLst::lst_derivative(cplx s) const {
    const cplx pv = p_(s);
    return (q_.derivative()(s) * pv - q_(s) * p_.derivative()(s)) / (pv * pv);
}

cplx RationalLst::excess_lst(cplx s) const {
    return excess_num_(s) / p_(s);
}

}  // namespace cph
