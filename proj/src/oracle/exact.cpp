#include <cmath>
#include <numbers>
#include <sstream>

#include "cph/detsym.hpp"
#include "cph/error.hpp"
#include "cph/oracle.hpp"
#include "cph/perturb.hpp"

namespace cph {

namespace {

cplx mixture_lst(const ServiceMixture& svc, cplx s) { return svc.lst(s); }

Eigen::MatrixXcd mixture_e_derivative(const MapModel& m, const ServiceMixture& svc, cplx s) {
    Eigen::MatrixXcd e = (m.a2() * m.lambda.asDiagonal()).cast<cplx>() * svc.lst_derivative(s);
    e += Eigen::MatrixXcd::Identity(m.n, m.n);
    return e;
}

bool newton_root(const MapModel& m, const ServiceMixture& svc, cplx& s) {
    for (int it = 0; it < 100; ++it) {
        const Eigen::MatrixXcd e = eval_E(m, mixture_lst(svc, s), s);
        const cplx f = e.determinant();
        const cplx df = det_directional(e, mixture_e_derivative(m, svc, s));
        if (df == 0.0 || !std::isfinite(std::abs(df))) return false;
        cplx step = f / df;
        double damp = 1.0;
        while ((s - damp * step).real() <= 0.0 && damp > 1e-6) damp *= 0.5;
        if ((s - damp * step).real() <= 0.0) return false;
        s -= damp * step;
        if (std::abs(damp * step) <= 1e-14 * std::max(1.0, std::abs(s))) return true;
    }
    return false;
}

std::vector<cplx> find_roots(const MapModel& m, const ServiceMixture& svc, const std::vector<cplx>& guesses) {
    std::vector<cplx> out{0.0};
    for (cplx s : guesses) {
        if (!newton_root(m, svc, s)) {
            std::ostringstream os;
            os << "Newton iteration for the root near " << s << " did not converge";
            throw Error(Errc::RootDivergence, os.str());
        }
        for (size_t k = 1; k < out.size(); ++k)
            if (std::abs(out[k] - s) <= 1e-8 * std::max(1.0, std::abs(s)))
                throw Error(Errc::RootDivergence, "two starting points converged to the same root");
        out.push_back(s);
    }
    return out;
}

}  // namespace

ExactSolution::ExactSolution(const MapModel& m, const ServiceMixture& svc, std::vector<cplx> roots,
                             Eigen::VectorXd u)
    : m_(m), svc_(svc), roots_(std::move(roots)), u_(std::move(u)) {}

Eigen::MatrixXcd ExactSolution::matrix(cplx s) const { return eval_E(m_, svc_.lst(s), s); }

Eigen::VectorXcd ExactSolution::phi_direct(cplx s) const {
    const Eigen::MatrixXcd e = matrix(s);
    return e.transpose().fullPivLu().solve((s * u_.cast<cplx>()).eval());
}

Eigen::VectorXcd ExactSolution::phi(cplx s) const {
    if (std::abs(s) < 1e-12) return m_.pi.transpose().cast<cplx>();
    for (size_t k = 1; k < roots_.size(); ++k) {
        const double scale = std::max(1.0, std::abs(roots_[k]));
        if (std::abs(s - roots_[k]) < 1e-3 * scale) {
            const double rho = 2e-3 * scale;
            if (s.real() - rho <= 0.0) break;
            constexpr int kPoints = 16;
            Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(m_.n);
            for (int j = 0; j < kPoints; ++j) {
                const double th = 2.0 * std::numbers::pi * (j + 0.5) / kPoints;
                acc += phi_direct(s + rho * cplx(std::cos(th), std::sin(th)));
            }
            return acc / static_cast<double>(kPoints);
        }
    }
    return phi_direct(s);
}

double ExactSolution::tail(int i, double t) const {
    const double pi_i = m_.pi(i);
    return laplace_invert_numeric([&](cplx s) { return (pi_i - phi(s)(i)) / s; }, t, euler);
}

double ExactSolution::tail_minus_base(int i, double t, const BaseSolution& base) const {
    return laplace_invert_numeric([&](cplx s) { return (base.phi(i, s) - phi(s)(i)) / s; }, t, euler);
}

ExactSolution exact_mixture(const MapModel& m, const ServiceMixture& svc, const std::vector<cplx>& guesses) {
    const double margin = stability_margin(m, svc.mean());
    if (!(margin > 0.0)) throw Error(Errc::Unstable, "mixture model is not stable");
    std::vector<cplx> roots = find_roots(m, svc, guesses);

    const int n = m.n;
    Eigen::MatrixXcd a(n, n);
    a.col(0) = m.lambda.cwiseInverse().cast<cplx>();
    for (int k = 1; k < n; ++k) {
        const Eigen::MatrixXcd adj = numeric_adjugate(eval_E(m, svc.lst(roots[static_cast<size_t>(k)]),
                                                             roots[static_cast<size_t>(k)]));
        int best = 0;
        for (int c = 1; c < n; ++c)
            if (adj.col(c).norm() > adj.col(best).norm()) best = c;
        a.col(k) = adj.col(best);
    }
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
    c(0) = margin;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a.transpose());
    if (!lu.isInvertible()) throw Error(Errc::SingularSystem, "system for the mixture u is singular");
    const Eigen::VectorXcd u = lu.solve(c);
    if (u.imag().norm() > 1e-8 * std::max(u.norm(), 1e-300))
        throw Error(Errc::SingularSystem, "mixture u has a non-negligible imaginary part");
    return ExactSolution(m, svc, std::move(roots), u.real());
}

ExactSolution exact_mixture(const MapModel& m, const ServiceMixture& svc) {
    if (!(stability_margin(m, svc.mean()) > 0.0)) throw Error(Errc::Unstable, "mixture model is not stable");
    const BaseSolution base = solve_base(m, svc.phase);
    const PerturbData pd = perturb(m, svc, base);
    std::vector<cplx> guesses = pd.roots_at(svc.epsilon, base.s_roots);
    guesses.erase(guesses.begin());
    try {
        return exact_mixture(m, svc, guesses);
    } catch (const Error& e) {
        if (e.code() != Errc::RootDivergence) throw;
    }
    // continuation in epsilon from the base roots
    std::vector<cplx> cur(base.s_roots.begin() + 1, base.s_roots.end());
    constexpr int kSteps = 20;
    for (int step = 1; step <= kSteps; ++step) {
        const ServiceMixture mid = svc.with_epsilon(svc.epsilon * step / kSteps);
        std::vector<cplx> found = find_roots(m, mid, cur);
        cur.assign(found.begin() + 1, found.end());
    }
    return exact_mixture(m, svc, cur);
}

}  // namespace cph
