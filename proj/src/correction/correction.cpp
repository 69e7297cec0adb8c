#include "cph/correction.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cph/error.hpp"
#include "cph/quadrature.hpp"

namespace cph {

XiPolys xi_polys(const DetSym& ds, const RationalLst& phase) {
    const int n = ds.n;
    XiPolys xi;
    xi.n = n;
    xi.det = ds.det.assemble_dg(phase.q(), phase.p(), ds.r);
    xi.num.resize(static_cast<size_t>(n * n));
    xi.num_prime.resize(static_cast<size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            xi.num[static_cast<size_t>(i * n + l)] = ds.adjugate(l, i).assemble_dg(phase.q(), phase.p(), ds.r);
            xi.num_prime[static_cast<size_t>(i * n + l)] = ds.adjugate(l, i).assemble(phase.q(), phase.p(), ds.r);
        }
    return xi;
}

CorrectionData pf_coefficients(const BaseSolution& base, const XiPolys& xi, const Eigen::VectorXd& z, int i) {
    const int n = base.n;
    CorrectionData cd;
    cd.state = i;
    cd.g_num = xi.det;
    Poly b;
    for (int l = 0; l < n; ++l) {
        cd.a_num += xi.xi_prime(i, l) * z(l);
        b += xi.xi(i, l) * base.u(l);
    }
    cd.b_num = b * Poly::monomial(1);

    std::vector<Root> poles;
    for (size_t k = 1; k < base.s_roots.size(); ++k) poles.push_back({base.s_roots[k], 1});
    const auto& ys = base.y_roots[static_cast<size_t>(i)];
    for (const auto& y : ys) poles.push_back({-y.value, y.multiplicity});
    std::vector<cplx> flat;
    for (const auto& p : poles)
        for (int k = 0; k < p.multiplicity; ++k) flat.push_back(p.value);
    cd.w_den = Poly::from_roots(flat);

    const int top = cd.w_den.degree();
    auto split = [&](const Poly& num, double& lead, std::vector<cplx>& simple,
                     std::vector<std::vector<cplx>>& primed) {
        const Poly t = num.trimmed(1e-13);
        if (t.degree() > top) {
            std::ostringstream os;
            os << "correction numerator of state " << i << " has degree " << t.degree() << " above " << top;
            throw Error(Errc::DegreeViolation, os.str());
        }
        const PartialFractions pf = partial_fractions(t, poles, 1.0);
        lead = pf.polynomial_part[0].real();
        const size_t ns = base.s_roots.size() - 1;
        simple.clear();
        for (size_t k = 0; k < ns; ++k) simple.push_back(pf.residues[k][0]);
        primed.clear();
        for (size_t j = 0; j < ys.size(); ++j) {
            const auto& res = pf.residues[ns + j];
            const int mult = ys[j].multiplicity;
            const cplx y = ys[j].value;
            std::vector<cplx> lv(static_cast<size_t>(mult));
            for (int l = 1; l <= mult; ++l) {
                const int order = mult - l + 1;
                lv[static_cast<size_t>(l - 1)] = res[static_cast<size_t>(order - 1)] / std::pow(y, order);
            }
            primed.push_back(std::move(lv));
        }
    };

    std::vector<std::vector<cplx>> pa, pb, pg;
    split(cd.a_num, cd.z_i, cd.alpha_k, pa);
    split(cd.b_num, cd.beta, cd.beta_k, pb);
    split(cd.g_num, cd.gamma, cd.gamma_k, pg);
    for (size_t j = 0; j < ys.size(); ++j)
        cd.primed.push_back({ys[j].value, ys[j].multiplicity, pa[j], pb[j], pg[j]});
    return cd;
}

DeltaForms delta_forms(const CorrectionData& cd, const BaseSolution& base, const ServiceMixture& svc, int k) {
    const cplx sk = base.s_roots[static_cast<size_t>(k)];
    const cplx gap = excess_gap(svc, sk);
    const cplx phi = base.phi(cd.state, sk);
    const double ui = base.u(cd.state);
    const size_t idx = static_cast<size_t>(k - 1);
    return {gap * cd.gamma_k[idx] * phi / ui, (cd.alpha_k[idx] + cd.beta_k[idx] * gap) / ui};
}

void check_delta_consistency(const CorrectionData& cd, const BaseSolution& base, const ServiceMixture& svc,
                             double rel_tol) {
    for (size_t k = 1; k < base.s_roots.size(); ++k) {
        const DeltaForms f = delta_forms(cd, base, svc, static_cast<int>(k));
        const cplx gap = excess_gap(svc, base.s_roots[k]);
        const double floor =
            1e-12 * (std::abs(cd.alpha_k[k - 1]) + std::abs(cd.beta_k[k - 1] * gap)) / base.u(cd.state);
        const double diff = std::abs(f.from_det - f.from_num);
        if (diff > rel_tol * std::max(std::abs(f.from_det), std::abs(f.from_num)) + floor) {
            std::ostringstream os;
            os << "root shift forms disagree for state " << cd.state << " at root " << k << ": " << f.from_det
               << " vs " << f.from_num;
            throw Error(Errc::InconsistentDelta, os.str());
        }
    }
}

// ---------------------------------------------------------------------------
// heavy-tailed convolutions

namespace {

constexpr double kOuterTol = 1e-10;
constexpr double kInnerTol = 1e-11;
constexpr double kAbsFloor = 1e-10;

/// integral_0^inf e^{-s v} c_e(tau + v) dv
cplx excess_shift_transform(const HeavyTailFamily& h, double tau, cplx s) {
    auto f = [&](double w) -> cplx {
        if (w == 0.0) return 0.0;
        return 2.0 * w * std::exp(-s * (w * w)) * h.excess_density(tau + w * w);
    };
    try {
        return integrate(f, 0.0, std::numeric_limits<double>::infinity(), kInnerTol, kAbsFloor);
    } catch (const Error& e) {
        std::ostringstream os;
        os << "inner integral at shift " << tau << ", s = " << s << " did not converge";
        throw Error(Errc::QuadratureFailure, os.str());
    }
}

}  // namespace

cplx heavy_tail(const HeavyTailFamily& h, const ExpPolyMix& x, double t) {
    if (h.kind() == HeavyTailFamily::Kind::Rational) return convolve(x, h.rational_lst().excess()).tail(t);
    if (t <= 0.0) return x.atom0 + x.tail(0.0);
    cplx acc = x.atom0 * h.excess_tail(t) + x.tail(t);
    auto f = [&](double w) -> cplx { return 2.0 * w * x.density(t - w * w) * h.excess_tail(w * w); };
    acc += integrate(f, 0.0, std::sqrt(t), kOuterTol, kAbsFloor);
    return acc;
}

cplx heavy_interval(const HeavyTailFamily& h, const ExpPolyMix& x, double t, cplx s) {
    if (h.kind() == HeavyTailFamily::Kind::Rational)
        return convolve(x, h.rational_lst().excess()).interval(t, s);
    const double tt = std::max(t, 0.0);
    cplx acc = x.atom0 * excess_shift_transform(h, tt, s) + h.excess_lst(s) * x.interval(tt, s);
    if (tt > 0.0) {
        auto f = [&](double w) -> cplx {
            return 2.0 * w * x.density(tt - w * w) * excess_shift_transform(h, w * w, s);
        };
        acc += integrate(f, 0.0, std::sqrt(tt), kOuterTol, kAbsFloor);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// ThetaEvaluator

ThetaEvaluator::ThetaEvaluator(const BaseSolution& base, const CorrectionData& cd, const ServiceMixture& svc)
    : i_(cd.state),
      u_i_(base.u(cd.state)),
      svc_(svc),
      d_i_(base.y_poly[static_cast<size_t>(cd.state)]),
      x_poly_(base.x_poly),
      cd_(cd) {
    if (!(u_i_ > 0.0)) throw Error(Errc::SingularSystem, "empty-system probability of the state is not positive");
    v_ = base.workload[static_cast<size_t>(i_)];
    const ExpPolyMix vv = convolve(v_, v_);
    const ExpPolyMix& be = svc.phase.excess();

    cplx aa = cd.z_i, bb = cd.beta, gg = cd.gamma;
    for (size_t k = 1; k < base.s_roots.size(); ++k) {
        const cplx sk = base.s_roots[k];
        aa -= cd.alpha_k[k - 1] / sk;
        bb -= cd.beta_k[k - 1] / sk;
        gg -= cd.gamma_k[k - 1] / sk;
        s_k_.push_back(sk);
        alpha_k_.push_back(cd.alpha_k[k - 1]);
        ExpPolyMix yk = v_ * cd.beta_k[k - 1] + vv * (-cd.gamma_k[k - 1]);
        y_k_phase_.push_back(convolve(yk, be));
        y_k_.push_back(std::move(yk));
    }
    plain_ = v_ * aa;
    xd_ = v_ * bb + vv * (-gg);
    for (const auto& pc : cd.primed) {
        for (int l = 1; l <= pc.mult; ++l) {
            const ExpPolyMix erl = ExpPolyMix::erlang(pc.mult - l + 1, pc.y);
            const size_t li = static_cast<size_t>(l - 1);
            plain_ += convolve(v_, erl) * pc.alpha[li];
            xd_ += convolve(v_, erl) * pc.beta[li];
            xd_ += convolve(vv, erl) * (-pc.gamma[li]);
        }
    }
    plain_.compact();
    xd_.compact();
    xd_phase_ = convolve(xd_, be);
}

ThetaParts ThetaEvaluator::operator()(double t) const {
    const double mp = svc_.phase.mean(), mh = svc_.heavy.mean();
    ThetaParts out;
    out.plain = plain_.tail(t).real() / u_i_;
    out.excess = (mp * xd_phase_.tail(t) - mh * heavy_tail(svc_.heavy, xd_, t)).real() / u_i_;
    cplx block = 0.0;
    for (size_t k = 0; k < s_k_.size(); ++k) {
        const cplx sk = s_k_[k];
        block += (alpha_k_[k] * v_.interval(t, sk) + mp * y_k_phase_[k].interval(t, sk) -
                  mh * heavy_interval(svc_.heavy, y_k_[k], t, sk)) /
                 sk;
    }
    out.interval = block.real() / u_i_;
    return out;
}

cplx ThetaEvaluator::transform(cplx s) const {
    const cplx phi = d_i_(s) / x_poly_(s);
    const cplx w = cd_.w_den(s);
    const cplx gap = excess_gap(svc_, s);
    return phi / u_i_ * (cd_.a_num(s) + gap * cd_.b_num(s) - gap * phi * cd_.g_num(s)) / w;
}

// ---------------------------------------------------------------------------
// Corrector

Corrector::Corrector(const MapModel& m, const ServiceMixture& svc) : m_(m), svc_(svc) {
    if (!(stability_margin(m, svc.mean()) > 0.0)) throw Error(Errc::Unstable, "mixture model is not stable");
    ds_ = detsym(m);
    base_ = solve_base(m, svc.phase, ds_);
    pd_ = perturb(m, svc, base_);
    xi_ = xi_polys(ds_, svc.phase);
    for (int i = 0; i < m.n; ++i) {
        cd_.push_back(pf_coefficients(base_, xi_, pd_.z, i));
        check_delta_consistency(cd_.back(), base_, svc);
        theta_.emplace_back(base_, cd_.back(), svc);
    }
}

ApproxResult Corrector::evaluate(const std::vector<double>& grid) const {
    const int n = m_.n;
    const size_t g = grid.size();
    const double eps = svc_.epsilon;
    ApproxResult res;
    res.grid = grid;
    res.epsilon = eps;
    res.base.assign(static_cast<size_t>(n), std::vector<double>(g));
    res.corrected = res.base;
    res.simplified = res.base;
    for (int i = 0; i < n; ++i) {
        const size_t ii = static_cast<size_t>(i);
        for (size_t k = 0; k < g; ++k) {
            const double b = base_.tail(i, grid[k]);
            const ThetaParts th = eps == 0.0 ? ThetaParts{} : theta_[ii](grid[k]);
            res.base[ii][k] = b;
            res.corrected[ii][k] = b + eps * th.full();
            res.simplified[ii][k] = b + eps * th.simplified();
        }
    }
    const Eigen::VectorXd w = waiting_weight(m_);
    auto weigh = [&](const std::vector<std::vector<double>>& per) {
        std::vector<double> out(g, 0.0);
        for (int i = 0; i < n; ++i)
            for (size_t k = 0; k < g; ++k) out[k] += w(i) * per[static_cast<size_t>(i)][k];
        return out;
    };
    res.wait_base = weigh(res.base);
    res.wait_corrected = weigh(res.corrected);
    res.wait_simplified = weigh(res.simplified);
    return res;
}

ApproxResult approximate(const MapModel& m, const ServiceMixture& svc, const std::vector<double>& grid) {
    return Corrector(m, svc).evaluate(grid);
}

}  // namespace cph
