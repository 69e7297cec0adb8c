#include "cph/detsym.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

// ---------------------------------------------------------------------------
// GPolyCoeffs

cplx GPolyCoeffs::eval(cplx s, cplx g) const {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * g + (*it)(s);
    return acc;
}

cplx GPolyCoeffs::eval_ds(cplx s, cplx g, cplx dg) const {
    cplx acc = 0.0, gk = 1.0, gk1 = 0.0;
    for (size_t k = 0; k < c.size(); ++k) {
        acc += gk * c[k].derivative()(s) + static_cast<double>(k) * gk1 * dg * c[k](s);
        gk1 = gk;
        gk *= g;
    }
    return acc;
}

double GPolyCoeffs::scale() const {
    double sc = 0.0;
    for (const auto& p : c) sc = std::max(sc, p.norm());
    return sc;
}

int GPolyCoeffs::g_degree(double scale, double rel_tol) const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        if (c[static_cast<size_t>(k)].norm() > rel_tol * scale) return k;
    return -1;
}

Poly GPolyCoeffs::assemble(const Poly& q, const Poly& p, int r) const {
    const double sc = scale();
    Poly out;
    for (size_t k = 0; k < c.size(); ++k) {
        const int kk = static_cast<int>(k);
        if (kk > r) {
            if (c[k].norm() > 1e-11 * sc) throw Error(Errc::DegreeMismatch, "G-power above r present");
            continue;
        }
        out += q.pow(kk) * p.pow(r - kk) * c[k];
    }
    return out;
}

Poly GPolyCoeffs::assemble_dg(const Poly& q, const Poly& p, int r) const {
    const double sc = scale();
    Poly out;
    for (size_t k = 1; k < c.size(); ++k) {
        const int kk = static_cast<int>(k);
        if (kk > r) {
            if (c[k].norm() > 1e-11 * sc) throw Error(Errc::DegreeMismatch, "G-power above r present");
            continue;
        }
        out += static_cast<double>(kk) * q.pow(kk - 1) * p.pow(r - kk + 1) * c[k];
    }
    return out;
}

GPolyCoeffs& GPolyCoeffs::operator+=(const GPolyCoeffs& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size());
    for (size_t k = 0; k < o.c.size(); ++k) c[k] += o.c[k];
    return *this;
}

GPolyCoeffs GPolyCoeffs::scaled(cplx k) const {
    GPolyCoeffs out = *this;
    for (auto& p : out.c) p *= k;
    return out;
}

GPolyCoeffs GPolyCoeffs::times(const Poly& f) const {
    GPolyCoeffs out = *this;
    for (auto& p : out.c) p = p * f;
    return out;
}

// ---------------------------------------------------------------------------
// numeric helpers

Eigen::MatrixXcd eval_E(const MapModel& m, cplx g, cplx s) {
    const int n = m.n;
    Eigen::MatrixXcd e(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            e(i, j) = (m.q1(i, j) + g * m.q2(i, j)) * m.p(i, j) * m.lambda(j);
            if (i == j) e(i, j) += s - m.lambda(j);
        }
    return e;
}

cplx det_replace_column(const Eigen::MatrixXcd& m, int j, const Eigen::VectorXcd& col) {
    Eigen::MatrixXcd w = m;
    w.col(j) = col;
    return w.determinant();
}

Eigen::MatrixXcd numeric_adjugate(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXcd adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1.0;
        return adj;
    }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            Eigen::MatrixXcd minor(n - 1, n - 1);
            for (int i = 0, ii = 0; i < n; ++i) {
                if (i == r) continue;
                for (int j = 0, jj = 0; j < n; ++j) {
                    if (j == c) continue;
                    minor(ii, jj++) = m(i, j);
                }
                ++ii;
            }
            const double sgn = ((r + c) % 2 == 0) ? 1.0 : -1.0;
            adj(c, r) = sgn * minor.determinant();
        }
    return adj;
}

// ---------------------------------------------------------------------------
// subset expansions

namespace {

using Mask = unsigned;

std::vector<int> members(Mask s, int n) {
    std::vector<int> out;
    for (int k = 0; k < n; ++k)
        if (s & (1u << k)) out.push_back(k);
    return out;
}

/// prod over k in set of (s - lambda_k)
Poly zeta(const MapModel& m, Mask set) {
    Poly p = Poly::constant(1.0);
    for (int k : members(set, m.n)) p = p * Poly::linear(m.lambda(k));
    return p;
}

double lambda_prod(const MapModel& m, Mask set) {
    double v = 1.0;
    for (int k : members(set, m.n)) v *= m.lambda(k);
    return v;
}

/// det of the matrix with rows `rows`, columns `cols`; column c comes from A2 if c is in gamma, else A1.
double mixed_det(const Eigen::MatrixXd& a1, const Eigen::MatrixXd& a2, const std::vector<int>& rows,
                 const std::vector<int>& cols, Mask gamma) {
    const int k = static_cast<int>(rows.size());
    if (k == 0) return 1.0;
    Eigen::MatrixXd w(k, k);
    for (int jj = 0; jj < k; ++jj) {
        const int c = cols[static_cast<size_t>(jj)];
        const Eigen::MatrixXd& src = (gamma & (1u << c)) ? a2 : a1;
        for (int ii = 0; ii < k; ++ii) w(ii, jj) = src(rows[static_cast<size_t>(ii)], c);
    }
    return w.determinant();
}

/// Expansion over S within `universe` of zeta^{universe \ S} lambda^{S + extra_col} times
/// the mixed determinant on rows S + extra_row, columns S + extra_col, with every column
/// split between A1 and A2.  extra_* may be -1 for none.
GPolyCoeffs expand(const MapModel& m, Mask universe, int extra_row, int extra_col, Mask sign_set) {
    const int n = m.n;
    const Eigen::MatrixXd a1 = m.a1(), a2 = m.a2();
    GPolyCoeffs out;
    out.c.assign(static_cast<size_t>(n) + 1, Poly());
    // enumerate S as submasks of universe
    for (Mask s = universe;; s = (s - 1) & universe) {
        Mask rows_mask = s | (extra_row >= 0 ? (1u << extra_row) : 0u);
        Mask cols_mask = s | (extra_col >= 0 ? (1u << extra_col) : 0u);
        const std::vector<int> rows = members(rows_mask, n);
        const std::vector<int> cols = members(cols_mask, n);
        const int outside = std::popcount(sign_set & ~s);
        const double sgn = (outside % 2 == 0) ? 1.0 : -1.0;
        const Poly z = zeta(m, universe & ~s) * (sgn * lambda_prod(m, cols_mask));
        for (Mask g = cols_mask;; g = (g - 1) & cols_mask) {
            const double d = mixed_det(a1, a2, rows, cols, g);
            if (d != 0.0) out.c[static_cast<size_t>(std::popcount(g))] += z * d;
            if (g == 0) break;
        }
        if (s == 0) break;
    }
    return out;
}

void check_cap(const MapModel& m, int cap) {
    if (m.n > cap || m.n > 20) {
        std::ostringstream os;
        os << "state space of size " << m.n << " exceeds the cap " << cap;
        throw Error(Errc::StateSpaceTooLarge, os.str());
    }
}

}  // namespace

GPolyCoeffs det_coeffs(const MapModel& m, int cap) {
    check_cap(m, cap);
    const Mask all = (1u << m.n) - 1u;
    return expand(m, all, -1, -1, 0u);
}

std::vector<GPolyCoeffs> adjugate_coeffs(const MapModel& m, int cap) {
    check_cap(m, cap);
    const int n = m.n;
    const Mask all = (1u << n) - 1u;
    std::vector<GPolyCoeffs> adj(static_cast<size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            GPolyCoeffs entry;
            if (i == j) {
                entry = expand(m, all & ~(1u << i), -1, -1, 0u);
            } else {
                const int lo = std::min(i, j), hi = std::max(i, j);
                Mask between = 0u;
                for (int k = lo + 1; k < hi; ++k) between |= (1u << k);
                const Mask universe = all & ~(1u << i) & ~(1u << j);
                entry = expand(m, universe, i, j, between);
                if ((i + j) % 2 != 0) entry = entry.scaled(-1.0);
            }
            adj[static_cast<size_t>(i * n + j)] = std::move(entry);
        }
    return adj;
}

GPolyCoeffs numerator_coeffs(const DetSym& ds, int i, const Eigen::VectorXcd& u) {
    GPolyCoeffs out;
    out.c.assign(static_cast<size_t>(ds.n) + 1, Poly());
    for (int l = 0; l < ds.n; ++l) out += ds.adjugate(l, i).scaled(u(l));
    return out.times(Poly::monomial(1));
}

RankBound rank_bound_K(const MapModel& m, const GPolyCoeffs& det, const std::vector<GPolyCoeffs>& adj) {
    RankBound rb;
    const Eigen::MatrixXd a2 = m.a2();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a2);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * (sv.size() ? sv(0) : 0.0);
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > tol) ++rb.K;
    double sc = det.scale();
    for (const auto& a : adj) sc = std::max(sc, a.scale());
    rb.r = det.g_degree(sc);
    for (const auto& a : adj) rb.r = std::max(rb.r, a.g_degree(sc));
    rb.r = std::max(rb.r, 1);
    return rb;
}

DetSym detsym(const MapModel& m, int cap) {
    DetSym ds;
    ds.n = m.n;
    ds.det = det_coeffs(m, cap);
    ds.adj = adjugate_coeffs(m, cap);
    const RankBound rb = rank_bound_K(m, ds.det, ds.adj);
    ds.K = rb.K;
    ds.r = rb.r;
    return ds;
}

}  // namespace cph
