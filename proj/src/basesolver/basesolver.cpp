#include "cph/basesolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

namespace {

/// Quotient of num by div, fitted in the least-squares sense; relative residual through *resid.
Poly lsq_divide(const Poly& num, const Poly& div, double* resid) {
    const int dn = num.degree(), dd = div.degree();
    const int dq = dn - dd;
    if (dq < 0) throw Error(Errc::DegreeMismatch, "quotient degree is negative");
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dn + 1, dq + 1);
    for (int j = 0; j <= dq; ++j)
        for (int k = 0; k <= dd; ++k) a(j + k, j) = div[k];
    Eigen::VectorXcd b(dn + 1);
    for (int k = 0; k <= dn; ++k) b(k) = num[k];
    Eigen::VectorXcd x = a.colPivHouseholderQr().solve(b);
    if (resid) *resid = (a * x - b).norm() / std::max(b.norm(), 1e-300);
    std::vector<cplx> c(x.data(), x.data() + x.size());
    return Poly(std::move(c));
}

Poly realified(const Poly& p) {
    if (!p.is_real(1e-9)) return p;
    return Poly::from_real(p.real_coeffs());
}

std::vector<Root> negated(const std::vector<Root>& rs) {
    std::vector<Root> out = rs;
    for (auto& r : out) {
        r.value = -r.value;
        if (std::abs(r.value.imag()) <= 1e-12 * std::abs(r.value)) r.value.imag(0.0);
    }
    return out;
}

}  // namespace

Poly assemble_char_poly(const DetSym& ds, const RationalLst& phase) {
    Poly c = realified(ds.det.assemble(phase.q(), phase.p(), ds.r)).trimmed(1e-14);
    const int expected = ds.n + ds.r * phase.order();
    if (c.degree() != expected) {
        std::ostringstream os;
        os << "characteristic polynomial has degree " << c.degree() << ", expected " << expected;
        throw Error(Errc::DegreeMismatch, os.str());
    }
    return c * (1.0 / c.leading());
}

RootClasses classify_roots(const Poly& char_poly, int n) {
    std::vector<cplx> raw = roots(char_poly);
    double scale = 1.0;
    for (const auto& z : raw) scale = std::max(scale, std::abs(z));

    size_t zero = 0;
    for (size_t k = 1; k < raw.size(); ++k)
        if (std::abs(raw[k]) < std::abs(raw[zero])) zero = k;
    if (std::abs(raw[zero]) > 1e-8 * scale) throw Error(Errc::WrongRootCount, "no root at s = 0");

    RootClasses rc;
    rc.s_roots.push_back(0.0);
    std::vector<cplx> neg;
    const double edge = 1e-10 * scale;
    for (size_t k = 0; k < raw.size(); ++k) {
        if (k == zero) continue;
        if (raw[k].real() > edge) rc.s_roots.push_back(raw[k]);
        else if (raw[k].real() < -edge) neg.push_back(raw[k]);
        else throw Error(Errc::WrongRootCount, "root on the imaginary axis");
    }
    if (static_cast<int>(rc.s_roots.size()) != n) {
        std::ostringstream os;
        os << "found " << rc.s_roots.size() - 1 << " roots with positive real part, expected " << n - 1;
        throw Error(Errc::WrongRootCount, os.str());
    }
    std::sort(rc.s_roots.begin() + 1, rc.s_roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (size_t k = 1; k < rc.s_roots.size(); ++k) {
        for (size_t j = 0; j < raw.size(); ++j) {
            if (raw[j] == rc.s_roots[k]) continue;
            if (std::abs(raw[j] - rc.s_roots[k]) <= 1e-6 * scale)
                throw Error(Errc::MultiplePositiveRoot, "roots with positive real part are not simple");
        }
    }
    rc.x_roots = negated(cluster_roots(char_poly, neg));
    return rc;
}

EigvecA eigvec_a(const DetSym& ds, const RationalLst& phase, cplx s_k) {
    const int n = ds.n;
    const cplx g = phase.lst(s_k), dg = phase.lst_derivative(s_k);
    EigvecA best;
    double best_norm = -1.0, scale = 0.0;
    for (int m = 0; m < n; ++m) {
        Eigen::VectorXcd a(n), da(n);
        for (int l = 0; l < n; ++l) {
            a(l) = ds.adjugate(l, m).eval(s_k, g);
            da(l) = ds.adjugate(l, m).eval_ds(s_k, g, dg);
            scale = std::max(scale, ds.adjugate(l, m).scale() * std::max(1.0, std::pow(std::abs(s_k), n - 1)));
        }
        if (a.norm() > best_norm) {
            best_norm = a.norm();
            best = {a, da, m};
        }
    }
    if (!(best_norm > 1e-12 * std::max(scale, 1e-300)))
        throw Error(Errc::ZeroAdjugate, "all adjugate columns vanish at the root");
    return best;
}

Eigen::VectorXd solve_u(const MapModel& m, double mean_service, const std::vector<EigvecA>& a_vecs) {
    const int n = m.n;
    Eigen::MatrixXcd a(n, n);
    a.col(0) = m.lambda.cwiseInverse().cast<cplx>();
    for (int k = 1; k < n; ++k) a.col(k) = a_vecs[static_cast<size_t>(k - 1)].a;
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
    c(0) = stability_margin(m, mean_service);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a.transpose());
    if (!lu.isInvertible()) throw Error(Errc::SingularSystem, "system for u is singular");
    Eigen::VectorXcd u = lu.solve(c);
    if (u.imag().norm() > 1e-8 * std::max(u.norm(), 1e-300))
        throw Error(Errc::SingularSystem, "u has a non-negligible imaginary part");
    return u.real();
}

void workload(const DetSym& ds, const RationalLst& phase, BaseSolution& sol) {
    const int n = ds.n;
    Poly z = Poly::monomial(1);
    for (size_t k = 1; k < sol.s_roots.size(); ++k) z = z * Poly::linear(sol.s_roots[k]);

    std::vector<cplx> xs;
    for (const auto& x : sol.x_roots)
        for (int k = 0; k < x.multiplicity; ++k) xs.push_back(-x.value);
    sol.x_poly = realified(Poly::from_roots(xs));
    const std::vector<Root> poles = negated(sol.x_roots);

    sol.y_poly.assign(static_cast<size_t>(n), Poly());
    sol.y_roots.assign(static_cast<size_t>(n), {});
    sol.workload.assign(static_cast<size_t>(n), ExpPolyMix());
    sol.ccdf.assign(static_cast<size_t>(n), ExpPolyMix());
    const Eigen::VectorXcd u = sol.u.cast<cplx>();
    for (int i = 0; i < n; ++i) {
        const Poly num = realified(numerator_coeffs(ds, i, u).assemble(phase.q(), phase.p(), ds.r));
        for (size_t k = 1; k < sol.s_roots.size(); ++k) {
            const cplx sk = sol.s_roots[k];
            if (std::abs(num(sk)) > 1e-7 * num.eval_scale(sk)) {
                std::ostringstream os;
                os << "numerator of state " << i << " does not vanish at s = " << sk;
                throw Error(Errc::CancellationFailure, os.str());
            }
        }
        double resid = 0.0;
        Poly d = realified(lsq_divide(num, z, &resid));
        if (resid > 1e-7) throw Error(Errc::CancellationFailure, "deflation of the positive roots left a residual");
        std::vector<Root> ys = negated(roots_clustered(d));
        for (const auto& y : ys)
            if (!(y.value.real() > 0.0)) throw Error(Errc::UnstablePole, "numerator root with nonnegative real part");
        sol.y_roots[static_cast<size_t>(i)] = ys;
        sol.y_poly[static_cast<size_t>(i)] = d;
        sol.workload[static_cast<size_t>(i)] = invert_rational(d, poles, 1.0);

        const cplx phi0 = d(0.0) / sol.x_poly(0.0);
        std::vector<cplx> tn = (phi0 * sol.x_poly - d).coeffs();
        if (!tn.empty()) tn.erase(tn.begin());
        sol.ccdf[static_cast<size_t>(i)] = invert_rational(Poly(std::move(tn)), poles, 1.0);
    }
}

BaseSolution solve_base(const MapModel& m, const RationalLst& phase, const DetSym& ds) {
    BaseSolution sol;
    sol.n = m.n;
    sol.r = ds.r;
    sol.M = phase.order();
    sol.margin = stability_margin(m, phase.mean());
    if (!(sol.margin > 0.0)) throw Error(Errc::Unstable, "stability margin is not positive");
    sol.char_poly = assemble_char_poly(ds, phase);
    RootClasses rc = classify_roots(sol.char_poly, m.n);
    sol.s_roots = rc.s_roots;
    sol.x_roots = rc.x_roots;
    for (size_t k = 1; k < sol.s_roots.size(); ++k) sol.a_vecs.push_back(eigvec_a(ds, phase, sol.s_roots[k]));
    sol.u = solve_u(m, phase.mean(), sol.a_vecs);
    workload(ds, phase, sol);
    return sol;
}

BaseSolution solve_base(const MapModel& m, const RationalLst& phase) { return solve_base(m, phase, detsym(m)); }

}  // namespace cph
