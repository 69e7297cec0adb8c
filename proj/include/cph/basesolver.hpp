#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cph/detsym.hpp"
#include "cph/exppoly.hpp"
#include "cph/model.hpp"

namespace cph {

/// Adjugate column at a root of det E and its s-derivative.
struct EigvecA {
    Eigen::VectorXcd a;
    Eigen::VectorXcd a_deriv;
    int m_col = 0;
};

/// Workload solution with phase-type service.
struct BaseSolution {
    int n = 0;
    int r = 0;
    int M = 0;
    Poly char_poly;
    /// s_roots[0] = 0, then the roots with positive real part.
    std::vector<cplx> s_roots;
    /// Denominator prod (s + x)^mult.
    std::vector<Root> x_roots;
    /// Per state, numerator prod (s + y)^mult.
    std::vector<std::vector<Root>> y_roots;
    Eigen::VectorXd u;
    /// Indexed k - 1 for s_roots[k], k >= 1.
    std::vector<EigvecA> a_vecs;
    double margin = 0.0;

    /// prod (s + x_j), monic, degree rM.
    Poly x_poly;
    /// Per state u_i prod (s + y_ij), degree rM.
    std::vector<Poly> y_poly;
    /// Per state, the workload measure: atom u_i at 0 plus a density.
    std::vector<ExpPolyMix> workload;
    /// Per state, P(V_i > t) as a function (density() of this mix is the tail value).
    std::vector<ExpPolyMix> ccdf;

    cplx phi(int i, cplx s) const { return y_poly[static_cast<size_t>(i)](s) / x_poly(s); }
    double tail(int i, double t) const { return workload[static_cast<size_t>(i)].tail_real(t); }
};

Poly assemble_char_poly(const DetSym& ds, const RationalLst& phase);

struct RootClasses {
    std::vector<cplx> s_roots;
    std::vector<Root> x_roots;
};
RootClasses classify_roots(const Poly& char_poly, int n);

EigvecA eigvec_a(const DetSym& ds, const RationalLst& phase, cplx s_k);

/// Solves u A = c with A = (Lambda^-1 e, a_2, ..., a_N), c = (margin, 0, ...).
Eigen::VectorXd solve_u(const MapModel& m, double mean_service, const std::vector<EigvecA>& a_vecs);

/// Transforms and tails once u is known; fills x_poly, y_poly, y_roots, workload, ccdf.
void workload(const DetSym& ds, const RationalLst& phase, BaseSolution& sol);

/// Complete pipeline. Throws Unstable when the margin is not positive.
BaseSolution solve_base(const MapModel& m, const RationalLst& phase, const DetSym& ds);
BaseSolution solve_base(const MapModel& m, const RationalLst& phase);

}  // namespace cph
