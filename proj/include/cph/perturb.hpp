#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cph/basesolver.hpp"
#include "cph/model.hpp"

namespace cph {

/// mu_p Fe_p(s) - mu_h Fe_h(s), the excess-transform gap driving the perturbation.
cplx excess_gap(const ServiceMixture& svc, cplx s);

/// K(s) = s * excess_gap(s) * (Q2 o P) Lambda
Eigen::MatrixXcd k_matrix(const MapModel& m, const ServiceMixture& svc, cplx s);

/// dE/ds = G'(s) (Q2 o P) Lambda + I with G the phase transform.
Eigen::MatrixXcd e_derivative(const MapModel& m, const RationalLst& phase, cplx s);

/// Signed cofactors of row m: t_j = (-1)^(m+j) det C without row m and column j.
/// Throws AllCofactorsZero.
Eigen::VectorXcd null_vector_cofactor(const Eigen::MatrixXcd& c, int m);

/// sum_j det(C with column j replaced by D's column j): the derivative of det(C + eps D) at eps = 0.
cplx det_directional(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& d);

/// Root shift delta with perturbed root r - eps delta.  e, de, k are taken at the unperturbed root.
/// Throws ZeroDerivative if the root is not simple.
cplx perturbed_root(const Eigen::MatrixXcd& e, const Eigen::MatrixXcd& de, const Eigen::MatrixXcd& k);

/// First-order change of the cofactor eigenvector of row m_col in the direction k.
Eigen::VectorXcd k_vector(const Eigen::MatrixXcd& e, const Eigen::MatrixXcd& k, int m_col);

/// z = (c A^-1 B + d) A^-1 for row vectors c, d.  Throws SingularA.
Eigen::VectorXd z_vector(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Eigen::VectorXcd& c,
                         const Eigen::VectorXcd& d);

struct PerturbData {
    int n = 0;
    /// Indexed k - 1 for s_roots[k], k >= 1.
    std::vector<cplx> delta;
    std::vector<Eigen::VectorXcd> k_vecs;
    Eigen::MatrixXcd A, B;
    Eigen::VectorXcd c, d;
    Eigen::VectorXd z;
    std::function<Eigen::MatrixXcd(cplx)> K_fn;

    /// First-order roots s_k - eps delta_k, with the zero root first.
    std::vector<cplx> roots_at(double eps, const std::vector<cplx>& s_roots) const;
    /// u + eps z
    Eigen::VectorXd u_at(double eps, const Eigen::VectorXd& u) const { return u + eps * z; }
};

PerturbData perturb(const MapModel& m, const ServiceMixture& svc, const BaseSolution& base);

}  // namespace cph
