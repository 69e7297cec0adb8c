#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cph/model.hpp"
#include "cph/poly.hpp"

namespace cph {

/// sum_k G^k c_k(s): coefficients are polynomials in s.
struct GPolyCoeffs {
    std::vector<Poly> c;

    cplx eval(cplx s, cplx g) const;
    /// d/ds of eval along G = G(s) with dG/ds = dg.
    cplx eval_ds(cplx s, cplx g, cplx dg) const;
    /// Largest k whose coefficient is not negligible relative to scale.
    int g_degree(double scale, double rel_tol = 1e-11) const;
    double scale() const;

    /// sum_k q^k p^(r-k) c_k; throws DegreeMismatch if a power above r is present.
    Poly assemble(const Poly& q, const Poly& p, int r) const;
    /// sum_k k q^(k-1) p^(r-k+1) c_k, i.e. p^r times the G-derivative.
    Poly assemble_dg(const Poly& q, const Poly& p, int r) const;

    GPolyCoeffs& operator+=(const GPolyCoeffs& o);
    GPolyCoeffs scaled(cplx k) const;
    GPolyCoeffs times(const Poly& f) const;
};

/// Cached combinatorial expansions of det E(s) and its adjugate.
struct DetSym {
    int n = 0;
    GPolyCoeffs det;
    /// adj[i * n + j] is the adjugate entry (i, j).
    std::vector<GPolyCoeffs> adj;
    /// Numerical rank bound and the largest power actually present.
    int K = 0;
    int r = 0;

    const GPolyCoeffs& adjugate(int i, int j) const { return adj[static_cast<size_t>(i * n + j)]; }
};

/// E(s) = (Q1 o P + g Q2 o P) Lambda + s I - Lambda, g the service transform at s.
Eigen::MatrixXcd eval_E(const MapModel& m, cplx g, cplx s);

GPolyCoeffs det_coeffs(const MapModel& m, int cap = 12);
std::vector<GPolyCoeffs> adjugate_coeffs(const MapModel& m, int cap = 12);
/// s * sum_l u_l adj(l, i)
GPolyCoeffs numerator_coeffs(const DetSym& ds, int i, const Eigen::VectorXcd& u);

struct RankBound {
    int K = 0;
    int r = 0;
};
RankBound rank_bound_K(const MapModel& m, const GPolyCoeffs& det, const std::vector<GPolyCoeffs>& adj);

/// All of the above in one pass.
DetSym detsym(const MapModel& m, int cap = 12);

/// Determinant of m with column j replaced by col.
cplx det_replace_column(const Eigen::MatrixXcd& m, int j, const Eigen::VectorXcd& col);
/// Transposed cofactor matrix computed from minors.
Eigen::MatrixXcd numeric_adjugate(const Eigen::MatrixXcd& m);

}  // namespace cph
