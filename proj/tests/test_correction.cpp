#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "cph/correction.hpp"
#include "cph/error.hpp"
#include "cph/laplace.hpp"
#include "cph/quadrature.hpp"
#include "support.hpp"

using namespace cph;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// lead + sum_k simple_k / (s - s_k) + sum_j sum_l primed_l (y / (s + y))^(mult - l + 1)
cplx reassemble(const BaseSolution& b, const CorrectionData& cd, double lead, const std::vector<cplx>& simple,
                std::vector<cplx> PrimedCoeffs::*field, cplx s) {
    cplx acc = lead;
    for (size_t k = 0; k < simple.size(); ++k) acc += simple[k] / (s - b.s_roots[k + 1]);
    for (const auto& p : cd.primed)
        for (int l = 1; l <= p.mult; ++l)
            acc += (p.*field)[static_cast<size_t>(l - 1)] * std::pow(p.y / (s + p.y), p.mult - l + 1);
    return acc;
}

const std::vector<double> kTimes{0.01, 0.05, 0.2, 0.7, 1.5, 3.0, 6.0, 12.0, 25.0, 50.0};

}  // namespace

TEST_CASE("xi polynomials of the alternating MAP", "[xi]") {
    const double lam = 1.0, nu = 3.0;
    const RationalLst ph = RationalLst::exponential(nu);
    const XiPolys xi = xi_polys(detsym(test::alternating(lam)), ph);
    const Poly& p = ph.p();
    for (double sr : {-0.7, 0.4, 2.5}) {
        const cplx s(sr, 0.3);
        CHECK(test::rel_diff(xi.det(s), -lam * lam * p(s)) < 1e-13);
        // waiting-time weights (0, 2) turn these into -2 lam p and 2 (s - lam) p
        CHECK(test::rel_diff(2.0 * xi.xi_prime(1, 0)(s), -2.0 * lam * p(s)) < 1e-13);
        CHECK(test::rel_diff(2.0 * xi.xi_prime(1, 1)(s), 2.0 * (s - lam) * p(s)) < 1e-13);
    }
}

TEST_CASE("alternating MAP: no gamma lead, no beta terms in the second state", "[pf]") {
    const MapModel m = test::alternating(1.0);
    const ServiceMixture svc{RationalLst::exponential(3.0), HeavyTailFamily::abate_whitt(2.0), 0.01};
    const Corrector c(m, svc);
    const BaseSolution& b = c.base();
    for (int i = 0; i < 2; ++i) {
        const CorrectionData& cd = c.data(i);
        CHECK(std::abs(cd.gamma) < 1e-13);
        if (i == 0) continue;
        CHECK(std::abs(cd.beta) < 1e-13);
        for (const auto& v : cd.beta_k) CHECK(std::abs(v) < 1e-12);
        for (const auto& p : cd.primed)
            for (const auto& v : p.beta) CHECK(std::abs(v) < 1e-12);
    }
    // residues at the positive root
    const cplx s2 = b.s_roots[1];
    const CorrectionData& cd = c.data(1);
    cplx den = 1.0;
    for (const auto& y : b.y_roots[1]) den *= std::pow(s2 + y.value, y.multiplicity);
    cplx zxi = 0.0;
    for (int l = 0; l < 2; ++l) zxi += c.perturbation().z(l) * c.xi().xi_prime(1, l)(s2);
    CHECK(test::rel_diff(cd.alpha_k[0], zxi / den) < 1e-10);
    CHECK(test::rel_diff(cd.gamma_k[0], c.xi().det(s2) / den) < 1e-10);
}

TEST_CASE("gamma is the real-arrival intensity on the diagonal", "[pf]") {
    const MapModel m = test::mmpp2();
    const Corrector c(m, test::mmpp2_service());
    double expected = 0.0;
    for (int i = 0; i < m.n; ++i) expected += m.lambda(i) * m.q2(i, i) * m.p(i, i);
    const int deg = c.base().r * 1 + m.n - 1;
    CHECK_THAT(c.xi().det[deg].real(), WithinRel(expected, 1e-12));
    for (int i = 0; i < m.n; ++i) CHECK_THAT(c.data(i).gamma, WithinRel(expected, 1e-10));
    CHECK_THAT(expected, WithinRel(6.23722, 1e-5));
}

TEST_CASE("partial fractions reassemble the three correction ratios", "[pf][property]") {
    const MapModel m = test::mmpp2();
    for (const RationalLst& ph : {RationalLst::exponential(3.0), RationalLst::erlang(2, 6.0)}) {
        const Corrector c(m, {ph, HeavyTailFamily::abate_whitt(2.0), 0.01});
        const BaseSolution& b = c.base();
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-4.0, 4.0);
        for (int i = 0; i < m.n; ++i) {
            const CorrectionData& cd = c.data(i);
            CHECK(cd.a_num.degree() <= cd.w_den.degree());
            CHECK(std::abs(cd.a_num[cd.w_den.degree()] - cd.z_i) < 1e-10 * std::max(1.0, std::abs(cd.z_i)));
            for (int k = 0; k < 20; ++k) {
                const cplx s(u(rng), u(rng));
                const cplx w = cd.w_den(s);
                CHECK(test::rel_diff(reassemble(b, cd, cd.z_i, cd.alpha_k, &PrimedCoeffs::alpha, s), cd.a_num(s) / w) < 1e-8);
                CHECK(test::rel_diff(reassemble(b, cd, cd.beta, cd.beta_k, &PrimedCoeffs::beta, s), cd.b_num(s) / w) < 1e-8);
                CHECK(test::rel_diff(reassemble(b, cd, cd.gamma, cd.gamma_k, &PrimedCoeffs::gamma, s), cd.g_num(s) / w) < 1e-8);
            }
        }
    }
}

TEST_CASE("both forms of the root shift agree in every state", "[delta]") {
    const MapModel m = test::mmpp2();
    const ServiceMixture svc = test::mmpp2_service();
    const Corrector c(m, svc);
    for (int i = 0; i < m.n; ++i) {
        const DeltaForms f = delta_forms(c.data(i), c.base(), svc, 1);
        CHECK(test::rel_diff(f.from_det, f.from_num) < 1e-6);
        CHECK(test::rel_diff(f.from_det, c.perturbation().delta[0]) < 1e-6);
        CHECK_NOTHROW(check_delta_consistency(c.data(i), c.base(), svc));
    }
    CHECK_THAT(c.perturbation().delta[0].real(), WithinRel(2.24335, 1e-5));
}

TEST_CASE("corrupted coefficients fail the root-shift consistency check", "[delta]") {
    const MapModel m = test::mmpp2();
    const ServiceMixture svc = test::mmpp2_service();
    const Corrector c(m, svc);
    CorrectionData cd = c.data(0);
    cd.alpha_k[0] *= 1.01;
    try {
        check_delta_consistency(cd, c.base(), svc);
        FAIL("expected InconsistentDelta");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InconsistentDelta);
    }
}

TEST_CASE("heavy convolution tail against numerical inversion", "[heavy]") {
    const auto h = HeavyTailFamily::abate_whitt(2.0);
    ExpPolyMix x = ExpPolyMix::exponential(1.5) * 0.7;
    x.atom0 = 0.3;
    for (double t : {0.05, 0.5, 2.0, 10.0, 60.0}) {
        const double inv = laplace_invert_numeric(
            [&](cplx s) { return (x.mass() - x.lst(s) * h.excess_lst(s)) / s; }, t);
        CHECK_THAT(heavy_tail(h, x, t).real(), WithinRel(inv, 1e-7));
    }
}

TEST_CASE("heavy interval integral by parts", "[heavy]") {
    const auto h = HeavyTailFamily::abate_whitt(2.0);
    ExpPolyMix x = ExpPolyMix::erlang(2, 2.0) * 0.6;
    x.atom0 = 0.4;
    const double s = 4.65;
    for (double t : {0.0, 0.3, 2.0, 8.0}) {
        const double tail = heavy_tail(h, x, t).real();
        const double tail_int = integrate([&](double v) { return std::exp(-s * v) * heavy_tail(h, x, t + v).real(); },
                                          0.0, std::numeric_limits<double>::infinity(), 1e-11, 1e-15);
        CHECK_THAT(heavy_interval(h, x, t, s).real(), WithinRel(tail - s * tail_int, 1e-7));
    }
}

TEST_CASE("rational heavy component uses closed forms", "[heavy]") {
    const RationalLst r = RationalLst::erlang(2, 1.0);
    const auto h = HeavyTailFamily::rational(r);
    ExpPolyMix x = ExpPolyMix::exponential(1.0);
    for (double t : {0.5, 3.0}) {
        const double inv = laplace_invert_numeric([&](cplx s) { return (1.0 - x.lst(s) * r.excess_lst(s)) / s; }, t);
        CHECK_THAT(heavy_tail(h, x, t).real(), WithinRel(inv, 1e-7));
    }
}

TEST_CASE("tail correction matches inversion of its transform", "[theta]") {
    const MapModel m = test::mmpp2();
    for (const ServiceMixture& svc : {test::mmpp2_service(), test::mmpp2_service(0.01, 3.0)}) {
        const Corrector c(m, svc);
        for (int i = 0; i < m.n; ++i) {
            const ThetaEvaluator& th = c.theta(i);
            for (double t : kTimes) {
                const double inv = laplace_invert_numeric([&](cplx s) { return -th.transform(s) / s; }, t);
                CHECK_THAT(th(t).full(), WithinAbs(inv, 1e-6 * std::max(1.0, std::abs(inv))));
            }
        }
    }
}

TEST_CASE("alternating MAP tail correction matches inversion", "[theta]") {
    const MapModel m = test::alternating(1.0);
    const Corrector c(m, {RationalLst::exponential(3.0), HeavyTailFamily::abate_whitt(2.0), 0.01});
    for (int i = 0; i < m.n; ++i)
        for (double t : {0.1, 1.0, 5.0, 20.0}) {
            const double inv = laplace_invert_numeric([&](cplx s) { return -c.theta(i).transform(s) / s; }, t);
            CHECK_THAT(c.theta(i)(t).full(), WithinAbs(inv, 1e-6 * std::max(1.0, std::abs(inv))));
        }
}

TEST_CASE("degenerate mixture has a zero correction", "[theta]") {
    const MapModel m = test::mmpp2();
    const RationalLst ph = RationalLst::exponential(3.0);
    const Corrector c(m, {ph, HeavyTailFamily::rational(ph), 0.2});
    const ApproxResult r = c.evaluate(kTimes);
    for (int i = 0; i < m.n; ++i)
        for (size_t k = 0; k < kTimes.size(); ++k) {
            CHECK(std::abs(c.theta(i)(kTimes[k]).full()) < 1e-9);
            CHECK_THAT(r.corrected[static_cast<size_t>(i)][k], WithinAbs(r.base[static_cast<size_t>(i)][k], 1e-10));
        }
}

TEST_CASE("approximations at epsilon zero equal the base", "[approximate]") {
    const MapModel m = test::mmpp2();
    const ApproxResult r = approximate(m, test::mmpp2_service(0.0), kTimes);
    for (int i = 0; i < m.n; ++i) {
        CHECK(r.corrected[static_cast<size_t>(i)] == r.base[static_cast<size_t>(i)]);
        CHECK(r.simplified[static_cast<size_t>(i)] == r.base[static_cast<size_t>(i)]);
    }
}

TEST_CASE("approximations are built from the correction parts", "[approximate]") {
    const MapModel m = test::mmpp2();
    const ServiceMixture svc = test::mmpp2_service();
    const Corrector c(m, svc);
    const ApproxResult r = c.evaluate(kTimes);
    const Eigen::VectorXd w = waiting_weight(m);
    for (size_t k = 0; k < kTimes.size(); ++k) {
        double wait = 0.0, wait_base = 0.0, wait_theta = 0.0;
        for (int i = 0; i < m.n; ++i) {
            const size_t ii = static_cast<size_t>(i);
            const ThetaParts th = c.theta(i)(kTimes[k]);
            CHECK(r.corrected[ii][k] == r.base[ii][k] + svc.epsilon * th.full());
            CHECK_THAT(r.corrected[ii][k] - r.simplified[ii][k], WithinAbs(svc.epsilon * th.interval, 1e-12));
            wait += w(i) * r.corrected[ii][k];
            wait_base += w(i) * r.base[ii][k];
            wait_theta += w(i) * th.full();
        }
        CHECK_THAT(r.wait_corrected[k], WithinAbs(wait, 1e-12));
        CHECK_THAT(r.wait_corrected[k], WithinAbs(wait_base + svc.epsilon * wait_theta, 1e-12));
    }
}

TEST_CASE("unstable mixture is rejected", "[approximate]") {
    try {
        approximate(test::mmpp2(), test::mmpp2_service(0.9, 0.1), kTimes);
        FAIL("expected Unstable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Unstable);
    }
}
