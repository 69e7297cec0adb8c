#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cph/basesolver.hpp"
#include "cph/detsym.hpp"
#include "cph/exppoly.hpp"
#include "cph/model.hpp"
#include "cph/perturb.hpp"

namespace cph {

/// G-derivative and plain assemblies of the determinant and adjugate expansions.
struct XiPolys {
    int n = 0;
    /// sum_k k q^(k-1) p^(r-k+1) c_k(det)
    Poly det;
    /// num[i * n + l]: G-derivative assembly of adj(l, i)
    std::vector<Poly> num;
    /// num_prime[i * n + l]: plain assembly of adj(l, i)
    std::vector<Poly> num_prime;

    const Poly& xi(int i, int l) const { return num[static_cast<size_t>(i * n + l)]; }
    const Poly& xi_prime(int i, int l) const { return num_prime[static_cast<size_t>(i * n + l)]; }
};

XiPolys xi_polys(const DetSym& ds, const RationalLst& phase);

/// Coefficients attached to one pole -y of multiplicity mult; index l - 1 for level l = 1..mult,
/// where level l goes with the Erlang of order mult - l + 1.
struct PrimedCoeffs {
    cplx y;
    int mult = 1;
    std::vector<cplx> alpha, beta, gamma;
};

/// Partial-fraction data of the first-order correction for one state.
struct CorrectionData {
    int state = 0;
    /// sum_l z_l xi'_{i,l}, s sum_l u_l xi_{i,l}, xi_det, and their common denominator
    /// prod_k (s - s_k) prod_j (s + y_j)^mult.
    Poly a_num, b_num, g_num, w_den;
    double z_i = 0.0, beta = 0.0, gamma = 0.0;
    /// Indexed k - 1 for s_roots[k].
    std::vector<cplx> alpha_k, beta_k, gamma_k;
    std::vector<PrimedCoeffs> primed;
};

CorrectionData pf_coefficients(const BaseSolution& base, const XiPolys& xi, const Eigen::VectorXd& z, int i);

/// The two per-state forms of the root shift at s_k, from the determinant polynomial and
/// from the numerator polynomial.
struct DeltaForms {
    cplx from_det, from_num;
};
DeltaForms delta_forms(const CorrectionData& cd, const BaseSolution& base, const ServiceMixture& svc, int k);

/// Throws InconsistentDelta when the residue identity at some s_k fails.
void check_delta_consistency(const CorrectionData& cd, const BaseSolution& base, const ServiceMixture& svc,
                             double rel_tol = 1e-6);

/// P(X + C > t) for a signed measure X and the heavy stationary excess C.
cplx heavy_tail(const HeavyTailFamily& h, const ExpPolyMix& x, double t);
/// integral_t^inf e^{-s (y - t)} d(X * C)(y)
cplx heavy_interval(const HeavyTailFamily& h, const ExpPolyMix& x, double t, cplx s);

/// Tail correction split into the parts kept and dropped by the simplified approximation.
struct ThetaParts {
    double plain = 0.0;
    double excess = 0.0;
    double interval = 0.0;

    double full() const { return plain + excess + interval; }
    double simplified() const { return plain + excess; }
};

/// Per-state evaluator of the tail correction, with all phase-type convolutions done in closed form.
class ThetaEvaluator {
public:
    ThetaEvaluator(const BaseSolution& base, const CorrectionData& cd, const ServiceMixture& svc);

    ThetaParts operator()(double t) const;
    /// Transform of the correction measure evaluated directly from the polynomials.
    cplx transform(cplx s) const;

private:
    int i_;
    double u_i_;
    ServiceMixture svc_;
    Poly d_i_, x_poly_;
    CorrectionData cd_;
    ExpPolyMix v_;
    ExpPolyMix plain_;
    ExpPolyMix xd_, xd_phase_;
    std::vector<cplx> s_k_, alpha_k_;
    std::vector<ExpPolyMix> y_k_, y_k_phase_;
};

/// Result on a time grid; per-state vectors indexed [state][grid point].
struct ApproxResult {
    std::vector<double> grid;
    std::vector<std::vector<double>> base, corrected, simplified;
    /// omega-weighted sums over states.
    std::vector<double> wait_base, wait_corrected, wait_simplified;
    double epsilon = 0.0;
};

/// Everything needed to evaluate both approximations at a given mixture.
class Corrector {
public:
    Corrector(const MapModel& m, const ServiceMixture& svc);

    const BaseSolution& base() const { return base_; }
    const PerturbData& perturbation() const { return pd_; }
    const XiPolys& xi() const { return xi_; }
    const CorrectionData& data(int i) const { return cd_[static_cast<size_t>(i)]; }
    const ThetaEvaluator& theta(int i) const { return theta_[static_cast<size_t>(i)]; }
    const ServiceMixture& service() const { return svc_; }

    ApproxResult evaluate(const std::vector<double>& grid) const;

private:
    MapModel m_;
    ServiceMixture svc_;
    DetSym ds_;
    BaseSolution base_;
    PerturbData pd_;
    XiPolys xi_;
    std::vector<CorrectionData> cd_;
    std::vector<ThetaEvaluator> theta_;
};

/// Throws Unstable when the mixture is not stable.
ApproxResult approximate(const MapModel& m, const ServiceMixture& svc, const std::vector<double>& grid);

}  // namespace cph
