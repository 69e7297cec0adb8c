#include "cph/exppoly.hpp"

#include <cmath>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

bool same_rate(cplx a, cplx b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * (std::max(std::abs(a), std::abs(b)) + 1e-300);
}

/// Convolution of c1 t^n1 e^{-r1 t} with c2 t^n2 e^{-r2 t}.
void convolve_terms(const ExpTerm& x, const ExpTerm& y, std::vector<ExpTerm>& out) {
    const cplx scale = x.c * y.c * factorial(x.n) * factorial(y.n);
    if (same_rate(x.r, y.r, 1e-9)) {
        const int n = x.n + y.n + 1;
        out.push_back({scale / factorial(n), n, 0.5 * (x.r + y.r)});
        return;
    }
    // 1/((s+r1)^m (s+r2)^n) split over the two poles.
    const int m = x.n + 1, n = y.n + 1;
    const cplx d = y.r - x.r;
    for (int k = 1; k <= m; ++k) {
        double sgn = ((m - k) % 2 == 0) ? 1.0 : -1.0;
        cplx a = sgn * binom(m + n - k - 1, n - 1) / std::pow(d, m + n - k);
        out.push_back({scale * a / factorial(k - 1), k - 1, x.r});
    }
    for (int k = 1; k <= n; ++k) {
        double sgn = ((n - k) % 2 == 0) ? 1.0 : -1.0;
        cplx b = sgn * binom(m + n - k - 1, m - 1) / std::pow(-d, m + n - k);
        out.push_back({scale * b / factorial(k - 1), k - 1, y.r});
    }
}

}  // namespace

ExpPolyMix ExpPolyMix::point_mass(cplx mass) {
    ExpPolyMix m;
    m.atom0 = mass;
    return m;
}

ExpPolyMix ExpPolyMix::exponential(cplx rate) {
    ExpPolyMix m;
    m.terms.push_back({rate, 0, rate});
    return m;
}

ExpPolyMix ExpPolyMix::erlang(int k, cplx rate) {
    ExpPolyMix m;
    m.terms.push_back({std::pow(rate, k) / factorial(k - 1), k - 1, rate});
    return m;
}

cplx ExpPolyMix::density(double t) const {
    cplx acc = 0.0;
    for (const auto& term : terms) acc += term.c * std::pow(t, term.n) * std::exp(-term.r * t);
    return acc;
}

cplx ExpPolyMix::tail(double t) const {
    cplx acc = 0.0;
    for (const auto& term : terms) {
        // int_t^inf x^n e^{-r x} dx = n!/r^{n+1} e^{-r t} sum_k (r t)^k / k!
        const cplx rt = term.r * t;
        cplx sum = 0.0, pw = 1.0;
        for (int k = 0; k <= term.n; ++k) {
            sum += pw;
            pw *= rt / static_cast<double>(k + 1);
        }
        acc += term.c * factorial(term.n) / std::pow(term.r, term.n + 1) * std::exp(-rt) * sum;
    }
    return acc;
}

cplx ExpPolyMix::interval(double t, cplx s) const {
    cplx acc = 0.0;
    for (const auto& term : terms) {
        const cplx a = term.r + s;
        const cplx at = a * t;
        cplx sum = 0.0, pw = 1.0;
        for (int k = 0; k <= term.n; ++k) {
            sum += pw;
            pw *= at / static_cast<double>(k + 1);
        }
        acc += term.c * factorial(term.n) / std::pow(a, term.n + 1) * std::exp(-term.r * t) * sum;
    }
    return acc;
}

cplx ExpPolyMix::mass() const {
    cplx acc = atom0;
    for (const auto& term : terms) acc += term.c * factorial(term.n) / std::pow(term.r, term.n + 1);
    return acc;
}

cplx ExpPolyMix::lst(cplx s) const {
    cplx acc = atom0;
    for (const auto& term : terms) acc += term.c * factorial(term.n) / std::pow(s + term.r, term.n + 1);
    return acc;
}

double ExpPolyMix::tail_real(double t) const {
    cplx v = tail(t);
    double scale = 0.0;
    for (const auto& term : terms) scale += std::abs(term.c) * factorial(term.n) / std::pow(std::abs(term.r), term.n + 1);
    if (std::abs(v.imag()) > 1e-9 * std::max(scale, 1e-300) + 1e-12 * std::abs(v)) {
        std::ostringstream os;
        os << "imaginary residue " << v.imag() << " in tail at t=" << t;
        throw Error(Errc::CancellationFailure, os.str());
    }
    return v.real();
}

double ExpPolyMix::max_imag_ratio(const std::vector<double>& grid) const {
    double worst = 0.0;
    for (double t : grid) {
        cplx v = density(t);
        worst = std::max(worst, std::abs(v.imag()) / std::max(std::abs(v), 1e-300));
    }
    return worst;
}

ExpPolyMix& ExpPolyMix::operator+=(const ExpPolyMix& o) {
    atom0 += o.atom0;
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    compact();
    return *this;
}

ExpPolyMix& ExpPolyMix::operator*=(cplx k) {
    atom0 *= k;
    for (auto& term : terms) term.c *= k;
    return *this;
}

void ExpPolyMix::compact(double rel_tol) {
    std::vector<ExpTerm> merged;
    for (const auto& term : terms) {
        bool found = false;
        for (auto& m : merged) {
            if (m.n == term.n && same_rate(m.r, term.r, rel_tol)) {
                m.c += term.c;
                found = true;
                break;
            }
        }
        if (!found) merged.push_back(term);
    }
    terms = std::move(merged);
}

ExpPolyMix invert_rational(const Poly& num, const std::vector<Root>& den_roots, cplx lead) {
    for (const auto& r : den_roots)
        if (r.value.real() >= 0.0) {
            std::ostringstream os;
            os << "pole " << r.value << " has nonnegative real part";
            throw Error(Errc::UnstablePole, os.str());
        }
    PartialFractions pf = partial_fractions(num, den_roots, lead);
    ExpPolyMix m;
    m.atom0 = pf.polynomial_part[0];
    for (size_t a = 0; a < pf.poles.size(); ++a) {
        for (size_t j = 0; j < pf.residues[a].size(); ++j) {
            const int n = static_cast<int>(j);
            if (pf.residues[a][j] == cplx(0.0)) continue;
            m.terms.push_back({pf.residues[a][j] / factorial(n), n, -pf.poles[a].value});
        }
    }
    return m;
}

ExpPolyMix invert_rational(const Poly& num, const Poly& den) {
    return invert_rational(num, roots_clustered(den), den.leading());
}

ExpPolyMix convolve(const ExpPolyMix& a, const ExpPolyMix& b) {
    ExpPolyMix out;
    out.atom0 = a.atom0 * b.atom0;
    if (a.atom0 != cplx(0.0))
        for (const auto& t : b.terms) out.terms.push_back({a.atom0 * t.c, t.n, t.r});
    if (b.atom0 != cplx(0.0))
        for (const auto& t : a.terms) out.terms.push_back({b.atom0 * t.c, t.n, t.r});
    for (const auto& x : a.terms)
        for (const auto& y : b.terms) convolve_terms(x, y, out.terms);
    out.compact();
    return out;
}

}  // namespace cph
