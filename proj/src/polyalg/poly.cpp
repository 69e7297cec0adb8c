#include "cph/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cph/error.hpp"

namespace cph {

Poly::Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { normalize(); }

Poly::Poly(std::initializer_list<double> coeffs) {
    for (double v : coeffs) c_.emplace_back(v);
    normalize();
}

Poly Poly::from_real(const std::vector<double>& coeffs) {
    std::vector<cplx> c(coeffs.begin(), coeffs.end());
    return Poly(std::move(c));
}

Poly Poly::constant(cplx c) { return Poly(std::vector<cplx>{c}); }

Poly Poly::monomial(int k, cplx c) {
    std::vector<cplx> v(static_cast<size_t>(k) + 1, 0.0);
    v.back() = c;
    return Poly(std::move(v));
}

Poly Poly::linear(cplx root) { return Poly(std::vector<cplx>{-root, 1.0}); }

Poly Poly::from_roots(const std::vector<cplx>& roots) {
    Poly p = constant(1.0);
    for (const auto& r : roots) p = p * linear(r);
    return p;
}

void Poly::normalize() {
    while (!c_.empty() && c_.back() == cplx(0.0)) c_.pop_back();
}

cplx Poly::operator[](int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return 0.0;
    return c_[static_cast<size_t>(k)];
}

cplx Poly::operator()(cplx s) const {
    cplx acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double Poly::eval_scale(cplx s) const {
    double a = std::abs(s), acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * a + std::abs(*it);
    return acc;
}

double Poly::norm() const {
    double n = 0.0;
    for (const auto& v : c_) n = std::max(n, std::abs(v));
    return n;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Poly(std::move(d));
}

Poly Poly::shifted(cplx x) const {
    std::vector<cplx> a = c_;
    const size_t n = a.size();
    for (size_t k = 0; k + 1 < n; ++k)
        for (size_t j = n - 1; j > k; --j) a[j - 1] += x * a[j];
    return Poly(std::move(a));
}

Poly Poly::deflate(cplx root, cplx* rem) const {
    if (c_.empty()) {
        if (rem) *rem = 0.0;
        return {};
    }
    std::vector<cplx> q(c_.size() - 1);
    cplx acc = c_.back();
    for (size_t k = c_.size() - 1; k > 0; --k) {
        q[k - 1] = acc;
        acc = c_[k - 1] + acc * root;
    }
    if (rem) *rem = acc;
    return Poly(std::move(q));
}

void Poly::divmod(const Poly& d, Poly& quot, Poly& rem) const {
    if (d.is_zero()) throw Error(Errc::SingularSystem, "polynomial division by zero");
    std::vector<cplx> r = c_;
    const int dd = d.degree();
    if (degree() < dd) {
        quot = {};
        rem = *this;
        return;
    }
    std::vector<cplx> q(static_cast<size_t>(degree() - dd) + 1, 0.0);
    for (int k = degree() - dd; k >= 0; --k) {
        cplx f = r[static_cast<size_t>(k + dd)] / d.leading();
        q[static_cast<size_t>(k)] = f;
        for (int j = 0; j <= dd; ++j) r[static_cast<size_t>(k + j)] -= f * d[j];
        r[static_cast<size_t>(k + dd)] = 0.0;
    }
    r.resize(static_cast<size_t>(std::max(dd, 0)));
    quot = Poly(std::move(q));
    rem = Poly(std::move(r));
}

Poly Poly::trimmed(double rel_tol) const {
    const double tol = rel_tol * norm();
    std::vector<cplx> c = c_;
    while (!c.empty() && std::abs(c.back()) <= tol) c.pop_back();
    return Poly(std::move(c));
}

Poly Poly::conj() const {
    std::vector<cplx> c(c_.size());
    std::transform(c_.begin(), c_.end(), c.begin(), [](cplx v) { return std::conj(v); });
    return Poly(std::move(c));
}

bool Poly::is_real(double rel_tol) const {
    const double tol = rel_tol * std::max(norm(), 1e-300);
    return std::all_of(c_.begin(), c_.end(), [tol](cplx v) { return std::abs(v.imag()) <= tol; });
}

std::vector<double> Poly::real_coeffs() const {
    std::vector<double> r(c_.size());
    std::transform(c_.begin(), c_.end(), r.begin(), [](cplx v) { return v.real(); });
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    normalize();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    normalize();
    return *this;
}

Poly& Poly::operator*=(cplx k) {
    for (auto& v : c_) v *= k;
    normalize();
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (size_t i = 0; i < a.c_.size(); ++i)
        for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
}

Poly Poly::pow(int n) const {
    Poly r = constant(1.0);
    for (int k = 0; k < n; ++k) r = r * *this;
    return r;
}

// ---------------------------------------------------------------------------
// roots

namespace {

bool newton_polish(const Poly& p, const Poly& dp, cplx& z, int max_iter) {
    cplx fz = p(z);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fz) <= 1e-15 * p.eval_scale(z)) return true;
        cplx d = dp(z);
        if (d == cplx(0.0)) break;
        cplx step = fz / d;
        cplx zn = z - step;
        cplx fn = p(zn);
        if (!(std::abs(fn) < std::abs(fz))) {
            // Newton stalled at rounding level.
            break;
        }
        z = zn;
        fz = fn;
        if (std::abs(step) <= 1e-16 * std::abs(z)) break;
    }
    return std::abs(fz) <= 1e-10 * p.eval_scale(z);
}

double pair_scale(cplx a, cplx b) { return std::max(std::abs(a), std::abs(b)) + 1e-14; }

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]); }
    void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

/// Try to confirm a root of multiplicity m near c; returns true and refines c.
bool confirm_multiple(const Poly& p, int m, cplx& c, double max_move) {
    std::vector<Poly> der{p};
    for (int j = 1; j <= m; ++j) der.push_back(der.back().derivative());
    cplx z = c;
    newton_polish(der[static_cast<size_t>(m - 1)], der[static_cast<size_t>(m)], z, 50);
    if (std::abs(z - c) > max_move) return false;
    for (int j = 0; j < m; ++j) {
        const Poly& d = der[static_cast<size_t>(j)];
        if (std::abs(d(z)) > 1e-10 * d.eval_scale(z)) return false;
    }
    c = z;
    return true;
}

}  // namespace

std::vector<cplx> roots(const Poly& p) {
    const int n = p.degree();
    if (n < 1) throw Error(Errc::DegreeMismatch, "roots of a constant polynomial");
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[i] / p.leading();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw Error(Errc::NoConvergence, "companion eigenvalue solver failed");
    const Poly dp = p.derivative();
    std::vector<cplx> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        cplx z = es.eigenvalues()(i);
        if (!newton_polish(p, dp, z, 100)) {
            // Multiple roots converge slowly; accept the eigenvalue if it already has a small residual.
            if (std::abs(p(z)) > 1e-8 * p.eval_scale(z))
                throw Error(Errc::NoConvergence, "Newton polish failed to reach the residual target");
        }
        out.push_back(z);
    }
    return out;
}

std::vector<Root> cluster_roots(const Poly& p, const std::vector<cplx>& raw, double rel_tol) {
    const size_t n = raw.size();
    Dsu tight(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (std::abs(raw[i] - raw[j]) <= rel_tol * pair_scale(raw[i], raw[j]))
                tight.unite(static_cast<int>(i), static_cast<int>(j));

    Dsu loose(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (std::abs(raw[i] - raw[j]) <= 1e-3 * pair_scale(raw[i], raw[j]))
                loose.unite(static_cast<int>(i), static_cast<int>(j));

    std::vector<Root> out;
    std::vector<bool> done(n, false);
    for (size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        const int lroot = loose.find(static_cast<int>(i));
        std::vector<size_t> comp;
        for (size_t j = 0; j < n; ++j)
            if (!done[j] && loose.find(static_cast<int>(j)) == lroot) comp.push_back(j);

        cplx c = 0.0;
        for (size_t j : comp) c += raw[j];
        c /= static_cast<double>(comp.size());
        const int m = static_cast<int>(comp.size());
        if (m > 1 && confirm_multiple(p, m, c, 1e-3 * (std::abs(c) + 1e-14))) {
            out.push_back({c, m});
            for (size_t j : comp) done[j] = true;
            continue;
        }
        // Fall back to tight groups inside this component.
        for (size_t j : comp) {
            if (done[j]) continue;
            const int troot = tight.find(static_cast<int>(j));
            std::vector<size_t> grp;
            for (size_t k : comp)
                if (!done[k] && tight.find(static_cast<int>(k)) == troot) grp.push_back(k);
            cplx g = 0.0;
            for (size_t k : grp) g += raw[k];
            g /= static_cast<double>(grp.size());
            const int gm = static_cast<int>(grp.size());
            if (gm > 1) confirm_multiple(p, gm, g, rel_tol * (std::abs(g) + 1e-14));
            out.push_back({gm == 1 ? raw[j] : g, gm});
            for (size_t k : grp) done[k] = true;
        }
    }
    return out;
}

std::vector<Root> roots_clustered(const Poly& p) { return cluster_roots(p, roots(p)); }

// ---------------------------------------------------------------------------
// partial fractions

cplx PartialFractions::operator()(cplx s) const {
    cplx acc = polynomial_part(s);
    for (size_t k = 0; k < poles.size(); ++k) {
        cplx inv = 1.0 / (s - poles[k].value);
        cplx pw = inv;
        for (const auto& r : residues[k]) {
            acc += r * pw;
            pw *= inv;
        }
    }
    return acc;
}

PartialFractions partial_fractions(const Poly& num, const std::vector<Root>& den_roots, cplx lead) {
    int total = 0;
    for (const auto& r : den_roots) total += r.multiplicity;
    if (num.degree() > total) throw Error(Errc::DegreeOverflow, "numerator degree exceeds denominator degree");

    PartialFractions pf;
    pf.poles = den_roots;
    Poly work = num;
    if (num.degree() == total) {
        cplx c = num.leading() / lead;
        pf.polynomial_part = Poly::constant(c);
        Poly den = Poly::constant(lead);
        for (const auto& r : den_roots)
            for (int k = 0; k < r.multiplicity; ++k) den = den * Poly::linear(r.value);
        std::vector<cplx> w = (num - c * den).coeffs();
        w.resize(static_cast<size_t>(total));
        work = Poly(std::move(w));
    }

    for (size_t a = 0; a < den_roots.size(); ++a) {
        const cplx rho = den_roots[a].value;
        const int m = den_roots[a].multiplicity;
        // Taylor series in h = s - rho, truncated at order m-1.
        std::vector<cplx> nser(static_cast<size_t>(m), 0.0);
        Poly sh = work.shifted(rho);
        for (int k = 0; k < m; ++k) nser[static_cast<size_t>(k)] = sh[k];
        std::vector<cplx> dser(static_cast<size_t>(m), 0.0);
        dser[0] = lead;
        for (size_t b = 0; b < den_roots.size(); ++b) {
            if (b == a) continue;
            const cplx off = rho - den_roots[b].value;
            for (int e = 0; e < den_roots[b].multiplicity; ++e) {
                // multiply by (off + h)
                for (int k = m - 1; k >= 0; --k)
                    dser[static_cast<size_t>(k)] =
                        dser[static_cast<size_t>(k)] * off + (k > 0 ? dser[static_cast<size_t>(k - 1)] : cplx(0.0));
            }
        }
        // series division nser / dser
        std::vector<cplx> t(static_cast<size_t>(m), 0.0);
        for (int k = 0; k < m; ++k) {
            cplx acc = nser[static_cast<size_t>(k)];
            for (int j = 0; j < k; ++j) acc -= t[static_cast<size_t>(j)] * dser[static_cast<size_t>(k - j)];
            t[static_cast<size_t>(k)] = acc / dser[0];
        }
        std::vector<cplx> res(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) res[static_cast<size_t>(m - 1 - k)] = t[static_cast<size_t>(k)];
        pf.residues.push_back(std::move(res));
    }
    return pf;
}

}  // namespace cph
