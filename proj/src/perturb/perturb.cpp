#include "cph/perturb.hpp"

#include <cmath>
#include <sstream>

#include "cph/detsym.hpp"
#include "cph/error.hpp"

namespace cph {

namespace {

Eigen::MatrixXcd drop(const Eigen::MatrixXcd& c, int row, int col) {
    const int n = static_cast<int>(c.rows());
    Eigen::MatrixXcd out(n - 1, n - 1);
    for (int i = 0, ii = 0; i < n; ++i) {
        if (i == row) continue;
        for (int j = 0, jj = 0; j < n; ++j) {
            if (j == col) continue;
            out(ii, jj++) = c(i, j);
        }
        ++ii;
    }
    return out;
}

/// Product of column norms, a bound on |det| used to scale tolerances.
double hadamard(const Eigen::MatrixXcd& c) {
    double v = 1.0;
    for (int j = 0; j < c.cols(); ++j) v *= c.col(j).norm();
    return v;
}

}  // namespace

cplx excess_gap(const ServiceMixture& svc, cplx s) {
    return svc.phase.mean() * svc.phase.excess_lst(s) - svc.heavy.mean() * svc.heavy.excess_lst(s);
}

Eigen::MatrixXcd k_matrix(const MapModel& m, const ServiceMixture& svc, cplx s) {
    Eigen::MatrixXcd k = (m.a2() * m.lambda.asDiagonal()).cast<cplx>();
    return k * (s * excess_gap(svc, s));
}

Eigen::MatrixXcd e_derivative(const MapModel& m, const RationalLst& phase, cplx s) {
    Eigen::MatrixXcd e = (m.a2() * m.lambda.asDiagonal()).cast<cplx>() * phase.lst_derivative(s);
    e += Eigen::MatrixXcd::Identity(m.n, m.n);
    return e;
}

Eigen::VectorXcd null_vector_cofactor(const Eigen::MatrixXcd& c, int m) {
    const int n = static_cast<int>(c.rows());
    Eigen::VectorXcd t(n);
    if (n == 1) {
        t(0) = 1.0;
        return t;
    }
    for (int j = 0; j < n; ++j) {
        const double sgn = ((m + j) % 2 == 0) ? 1.0 : -1.0;
        t(j) = sgn * drop(c, m, j).determinant();
    }
    if (!(t.norm() > 1e-13 * std::max(hadamard(drop(c, m, 0)), 1e-300)))
        throw Error(Errc::AllCofactorsZero, "every cofactor of the chosen row vanishes");
    return t;
}

cplx det_directional(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& d) {
    cplx acc = 0.0;
    for (int j = 0; j < c.cols(); ++j) acc += det_replace_column(c, j, d.col(j));
    return acc;
}

cplx perturbed_root(const Eigen::MatrixXcd& e, const Eigen::MatrixXcd& de, const Eigen::MatrixXcd& k) {
    const cplx den = det_directional(e, de);
    double scale = 0.0;
    for (int j = 0; j < e.cols(); ++j) {
        Eigen::MatrixXcd w = e;
        w.col(j) = de.col(j);
        scale += hadamard(w);
    }
    if (!(std::abs(den) > 1e-12 * std::max(scale, 1e-300)))
        throw Error(Errc::ZeroDerivative, "determinant derivative vanishes at the root");
    return det_directional(e, k) / den;
}

Eigen::VectorXcd k_vector(const Eigen::MatrixXcd& e, const Eigen::MatrixXcd& k, int m_col) {
    const int n = static_cast<int>(e.rows());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    if (n == 1) return out;
    for (int j = 0; j < n; ++j) {
        const double sgn = ((m_col + j) % 2 == 0) ? 1.0 : -1.0;
        out(j) = sgn * det_directional(drop(e, m_col, j), drop(k, m_col, j));
    }
    return out;
}

Eigen::VectorXd z_vector(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Eigen::VectorXcd& c,
                         const Eigen::VectorXcd& d) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a.transpose());
    if (!lu.isInvertible()) throw Error(Errc::SingularA, "matrix A is singular");
    const Eigen::VectorXcd u = lu.solve(c);
    const Eigen::VectorXcd rhs = b.transpose() * u + d;
    const Eigen::VectorXcd z = lu.solve(rhs);
    if (z.imag().norm() > 1e-8 * std::max(z.norm(), 1e-300))
        throw Error(Errc::SingularA, "z has a non-negligible imaginary part");
    return z.real();
}

std::vector<cplx> PerturbData::roots_at(double eps, const std::vector<cplx>& s_roots) const {
    std::vector<cplx> out{0.0};
    for (size_t k = 1; k < s_roots.size(); ++k) out.push_back(s_roots[k] - eps * delta[k - 1]);
    return out;
}

PerturbData perturb(const MapModel& m, const ServiceMixture& svc, const BaseSolution& base) {
    const int n = m.n;
    PerturbData pd;
    pd.n = n;
    pd.K_fn = [m, svc](cplx s) { return k_matrix(m, svc, s); };
    pd.A.resize(n, n);
    pd.B = Eigen::MatrixXcd::Zero(n, n);
    pd.A.col(0) = m.lambda.cwiseInverse().cast<cplx>();
    for (size_t k = 1; k < base.s_roots.size(); ++k) {
        const cplx sk = base.s_roots[k];
        const EigvecA& av = base.a_vecs[k - 1];
        const Eigen::MatrixXcd e = eval_E(m, svc.phase.lst(sk), sk);
        const Eigen::MatrixXcd km = k_matrix(m, svc, sk);
        const cplx delta = perturbed_root(e, e_derivative(m, svc.phase, sk), km);
        const Eigen::VectorXcd kv = k_vector(e, km, av.m_col);
        pd.delta.push_back(delta);
        pd.k_vecs.push_back(kv);
        pd.A.col(static_cast<int>(k)) = av.a;
        pd.B.col(static_cast<int>(k)) = delta * av.a_deriv - kv;
    }
    pd.c = Eigen::VectorXcd::Zero(n);
    pd.d = Eigen::VectorXcd::Zero(n);
    pd.c(0) = base.margin;
    pd.d(0) = (svc.phase.mean() - svc.heavy.mean()) * (m.pi * m.a2() * Eigen::VectorXd::Ones(n))(0);
    pd.z = z_vector(pd.A, pd.B, pd.c, pd.d);
    return pd;
}

}  // namespace cph
