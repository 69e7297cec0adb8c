#pragma once

#include <string>

#include "cph/poly.hpp"
#include "cph/rational_lst.hpp"

namespace cph {

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// Service family for the heavy-tailed mixture component.
///
/// Two kinds ship: the long-tailed class with transform 1 - s/((k+sqrt s)(1+sqrt s))
/// and a rational (phase-type) stand-in used for degenerate mixtures.
class HeavyTailFamily {
public:
    enum class Kind { AbateWhitt, Rational };

    HeavyTailFamily() = default;
    static HeavyTailFamily abate_whitt(double kappa);
    static HeavyTailFamily rational(const RationalLst& lst);

    Kind kind() const { return kind_; }
    std::string tag() const;
    double kappa() const { return kappa_; }
    const RationalLst& rational_lst() const { return rational_; }
    double mean() const { return mean_; }

    /// Throws BranchCutCrossing for Re(s) < 0.
    cplx lst(cplx s) const;
    cplx lst_derivative(cplx s) const;
    cplx excess_lst(cplx s) const;

    /// P(C > t) and its density.
    double tail(double t) const;
    double density(double t) const;
    /// Stationary-excess tail and density.
    double excess_tail(double t) const;
    double excess_density(double t) const;

    /// t with tail(t) = u, for u in (0, 1].
    double quantile_tail(double u) const;

private:
    Kind kind_ = Kind::AbateWhitt;
    double kappa_ = 2.0;
    double mean_ = 0.5;
    RationalLst rational_;
};

/// Factory by configuration tag; throws UnsupportedFamily.
HeavyTailFamily heavy_family(const std::string& tag, double kappa);

}  // namespace cph
