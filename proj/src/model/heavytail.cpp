#include "cph/heavytail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

double erfcx(double x) {
    if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
    if (x < 12.0) {
        // exp(x^2) with x^2 split so the large part is exact
        const double hi = std::round(x * 4096.0) / 4096.0, lo = x - hi;
        return std::exp(hi * hi) * std::exp(lo * (2.0 * hi + lo)) * std::erfc(x);
    }
    // Continued fraction x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))
    double t = x;
    for (int n = 60; n >= 1; --n) t = x + 0.5 * n / t;
    return 1.0 / (std::sqrt(std::numbers::pi) * t);
}

namespace {

constexpr double kAsymptoticFrom = 50.0;
constexpr int kAsymptoticTerms = 18;

bool confluent(double kappa) { return std::abs(kappa - 1.0) < 1e-6; }

/// Start of the asymptotic expansion; its terms grow like kappa^-2n.
double asymptotic_from(double kappa) { return kAsymptoticFrom * std::max(1.0, 1.0 / (kappa * kappa)); }

/// (2n-1)!! / 2^n with sign (-1)^n
double odd_factor(int n) {
    double v = 1.0;
    for (int k = 1; k <= n; ++k) v *= -(2.0 * k - 1.0) / 2.0;
    return v;
}

/// (1 - k^{-2n}) / (1 - k)
double g_coef(double kappa, int n) {
    if (confluent(kappa)) return -2.0 * n;
    return (1.0 - std::pow(kappa, -2.0 * n)) / (1.0 - kappa);
}

/// (k^{-2n-1} - k) / (1 - k)
double h_coef(double kappa, int n) {
    if (confluent(kappa)) return 2.0 * n + 2.0;
    return (std::pow(kappa, -2.0 * n - 1.0) - kappa) / (1.0 - kappa);
}

double aw_tail(double kappa, double t) {
    if (t <= 0.0) return 1.0;
    if (t > asymptotic_from(kappa)) {
        double acc = 0.0, tp = 1.0;
        for (int n = 1; n <= kAsymptoticTerms; ++n) {
            tp /= t;
            acc += odd_factor(n) * g_coef(kappa, n) * tp;
        }
        return acc / std::sqrt(std::numbers::pi * t);
    }
    const double r = std::sqrt(t);
    if (confluent(kappa)) return (1.0 + 2.0 * t) * erfcx(r) - 2.0 * std::sqrt(t / std::numbers::pi);
    return (erfcx(r) - kappa * erfcx(kappa * r)) / (1.0 - kappa);
}

double aw_density(double kappa, double t) {
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    if (t > asymptotic_from(kappa)) {
        double acc = 0.0, tp = 1.0;
        for (int n = 1; n <= kAsymptoticTerms; ++n) {
            tp /= t;
            acc += odd_factor(n) * g_coef(kappa, n) * (n + 0.5) * tp;
        }
        return acc / (t * std::sqrt(std::numbers::pi * t));
    }
    const double r = std::sqrt(t);
    const double inv = 1.0 / std::sqrt(std::numbers::pi * t);
    if (confluent(kappa)) return (2.0 + 2.0 * t) * inv - (3.0 + 2.0 * t) * erfcx(r);
    return (-erfcx(r) + kappa * kappa * kappa * erfcx(kappa * r) + (1.0 - kappa * kappa) * inv) / (1.0 - kappa);
}

double aw_excess_tail(double kappa, double t) {
    if (t <= 0.0) return 1.0;
    if (t > asymptotic_from(kappa)) {
        double acc = 0.0, tp = 1.0;
        for (int n = 0; n <= kAsymptoticTerms; ++n) {
            acc += odd_factor(n) * h_coef(kappa, n) * tp;
            tp /= t;
        }
        return acc / std::sqrt(std::numbers::pi * t);
    }
    const double r = std::sqrt(t);
    if (confluent(kappa)) return (1.0 - 2.0 * t) * erfcx(r) + 2.0 * std::sqrt(t / std::numbers::pi);
    return (erfcx(kappa * r) - kappa * erfcx(r)) / (1.0 - kappa);
}

/// Solve tail(w^2) = u for w >= 0 with a bracketed Newton iteration.
template <class Tail, class Dens>
double invert_tail_sqrt(Tail tail, Dens dens, double u, double guess_t) {
    double lo = 0.0, hi = std::max(2.0 * std::sqrt(guess_t), 1.0);
    int expand = 0;
    while (tail(hi * hi) > u) {
        lo = hi;
        hi *= 2.0;
        if (++expand > 200) throw Error(Errc::NoConvergence, "tail inversion could not bracket the quantile");
    }
    double w = std::clamp(std::sqrt(guess_t), lo, hi);
    if (w <= lo || w >= hi) w = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = tail(w * w) - u;
        if (f > 0.0) lo = w; else hi = w;
        if (f == 0.0 || hi - lo <= 1e-15 * hi) break;
        const double d = -2.0 * w * dens(w * w);
        double next = (d < 0.0 && std::isfinite(d)) ? w - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - w) <= 1e-15 * w) {
            w = next;
            break;
        }
        w = next;
    }
    return w * w;
}

}  // namespace

HeavyTailFamily HeavyTailFamily::abate_whitt(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error(Errc::InvalidService, "kappa must be positive");
    HeavyTailFamily h;
    h.kind_ = Kind::AbateWhitt;
    h.kappa_ = kappa;
    h.mean_ = 1.0 / kappa;
    return h;
}

HeavyTailFamily HeavyTailFamily::rational(const RationalLst& lst) {
    HeavyTailFamily h;
    h.kind_ = Kind::Rational;
    h.rational_ = lst;
    h.mean_ = lst.mean();
    return h;
}

std::string HeavyTailFamily::tag() const { return kind_ == Kind::AbateWhitt ? "abate-whitt" : "rational"; }

cplx HeavyTailFamily::lst(cplx s) const {
    if (kind_ == Kind::Rational) return rational_.lst(s);
    if (s.real() < 0.0) throw Error(Errc::BranchCutCrossing, "square root evaluated outside the right half plane");
    const cplx w = std::sqrt(s);
    return 1.0 - s / ((kappa_ + w) * (1.0 + w));
}

cplx HeavyTailFamily::lst_derivative(cplx s) const {
    if (kind_ == Kind::Rational) return rational_.lst_derivative(s);
    if (s.real() < 0.0) throw Error(Errc::BranchCutCrossing, "square root evaluated outside the right half plane");
    const cplx w = std::sqrt(s);
    const cplx g = 1.0 / ((kappa_ + w) * (1.0 + w));
    return -g + g * 0.5 * w * (1.0 / (kappa_ + w) + 1.0 / (1.0 + w));
}

cplx HeavyTailFamily::excess_lst(cplx s) const {
    if (kind_ == Kind::Rational) return rational_.excess_lst(s);
    if (s.real() < 0.0) throw Error(Errc::BranchCutCrossing, "square root evaluated outside the right half plane");
    const cplx w = std::sqrt(s);
    return kappa_ / ((kappa_ + w) * (1.0 + w));
}

double HeavyTailFamily::tail(double t) const {
    if (kind_ == Kind::Rational) return t < 0.0 ? 1.0 : rational_.service().tail_real(t);
    return aw_tail(kappa_, t);
}

double HeavyTailFamily::density(double t) const {
    if (kind_ == Kind::Rational) return rational_.service().density(t).real();
    return aw_density(kappa_, t);
}

double HeavyTailFamily::excess_tail(double t) const {
    if (kind_ == Kind::Rational) return t < 0.0 ? 1.0 : rational_.excess().tail_real(t);
    return aw_excess_tail(kappa_, t);
}

double HeavyTailFamily::excess_density(double t) const {
    if (kind_ == Kind::Rational) return rational_.excess().density(t).real();
    return kappa_ * aw_tail(kappa_, t);
}

double HeavyTailFamily::quantile_tail(double u) const {
    if (!(u > 0.0) || u > 1.0) throw Error(Errc::ConfigError, "tail level must lie in (0, 1]");
    if (u == 1.0) return 0.0;
    auto tl = [this](double t) { return tail(t); };
    auto dn = [this](double t) { return density(t); };
    double guess = mean_;
    if (kind_ == Kind::AbateWhitt) {
        const double b1 = (1.0 + kappa_) / (2.0 * kappa_ * kappa_ * std::sqrt(std::numbers::pi));
        guess = std::pow(b1 / u, 2.0 / 3.0);
    } else {
        guess = -std::log(u) * mean_;
    }
    return invert_tail_sqrt(tl, dn, u, guess);
}

HeavyTailFamily heavy_family(const std::string& tag, double kappa) {
    if (tag == "abate-whitt") return HeavyTailFamily::abate_whitt(kappa);
    std::ostringstream os;
    os << "heavy-tail family '" << tag << "' is not supported";
    throw Error(Errc::UnsupportedFamily, os.str());
}

}  // namespace cph
