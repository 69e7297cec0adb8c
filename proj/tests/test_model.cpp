#include <cmath>

#include "catch_amalgamated.hpp"
#include "cph/error.hpp"
#include "cph/laplace.hpp"
#include "cph/model.hpp"
#include "support.hpp"

using namespace cph;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::ConfigError;
}

}  // namespace

TEST_CASE("alternating MAP derived quantities", "[build_map]") {
    const double lam = 1.5;
    const MapModel m = test::alternating(lam);
    CHECK(m.n == 2);
    CHECK(m.lambda(0) == lam);
    CHECK(m.lambda(1) == lam);
    CHECK(m.p(0, 0) == 0.0);
    CHECK(m.p(0, 1) == 1.0);
    CHECK(m.p(1, 0) == 1.0);
    CHECK(m.q1(0, 1) == 1.0);
    CHECK(m.q2(1, 0) == 1.0);
    CHECK_THAT(m.pi(0), WithinAbs(0.5, 1e-14));
    CHECK_THAT(m.pi(1), WithinAbs(0.5, 1e-14));
}

TEST_CASE("single-state Poisson MAP", "[build_map]") {
    const MapModel m = test::poisson(2.0);
    CHECK(m.lambda(0) == 2.0);
    CHECK(m.p(0, 0) == 1.0);
    CHECK(m.q2(0, 0) == 1.0);
    CHECK(m.pi(0) == 1.0);
}

TEST_CASE("two-state MMPP: diagonal jumps are real arrivals", "[build_map]") {
    const MapModel m = test::mmpp2();
    CHECK(m.q2(0, 0) == 1.0);
    CHECK(m.q2(1, 1) == 1.0);
    CHECK(m.q2(0, 1) == 0.0);
    CHECK_THAT(m.p(0, 1), WithinRel(1.0 / 9.0, 1e-14));
    CHECK_THAT(m.p(1, 0), WithinRel(0.97, 1e-14));
}

TEST_CASE("transition matrices are rebuilt from derived quantities", "[build_map][property]") {
    std::mt19937_64 rng(21);
    for (int n = 1; n <= 4; ++n) {
        const MapModel m = test::random_map(n, rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK_THAT(m.lambda(i) * m.p(i, j) * m.q2(i, j), WithinAbs(m.d2(i, j), 1e-12));
                if (i != j) CHECK_THAT(m.lambda(i) * m.p(i, j) * m.q1(i, j), WithinAbs(m.d1(i, j), 1e-12));
            }
        CHECK((m.pi * m.p - m.pi).norm() < 1e-12);
        CHECK_THAT(m.pi.sum(), WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("invalid generators are rejected", "[build_map]") {
    Eigen::MatrixXd d1(2, 2), d2(2, 2);
    d1 << -1.0, 0.5, 0.0, -1.0;
    d2 << 0.0, 0.0, 1.0, 0.0;
    CHECK(code_of([&] { build_map(d1, d2); }) == Errc::NotIntensityMatrix);

    d1 << -1.0, 0.0, 0.0, -1.0;
    d2 << 1.0, 0.0, 0.0, 1.0;
    CHECK(code_of([&] { build_map(d1, d2); }) == Errc::ReducibleChain);

    d1 << -1.0, 1.0, 0.0, 0.0;
    d2 << 0.0, 0.0, 0.0, 0.0;
    CHECK(code_of([&] { build_map(d1, d2); }) == Errc::ZeroExitRate);

    Eigen::MatrixXd e1(1, 1), e2(2, 2);
    e1 << -1.0;
    e2.setZero();
    CHECK(code_of([&] { build_map(e1, e2); }) == Errc::NotIntensityMatrix);
}

TEST_CASE("stability boundary of the alternating MAP is lam mu / 2 = 1", "[stability]") {
    const double lam = 1.0;
    const MapModel m = test::alternating(lam);
    for (double mu : {0.5, 1.0, 1.9, 1.999, 2.001, 3.0}) {
        const StabilityReport r = stability(m, {RationalLst::exponential(1.0 / mu), HeavyTailFamily::abate_whitt(2.0), 0.0});
        CHECK(r.stable == (lam * mu / 2.0 < 1.0));
        CHECK_THAT(r.load, WithinRel(lam * mu / 2.0, 1e-12));
    }
}

TEST_CASE("two-state MMPP load", "[stability]") {
    const StabilityReport r = stability(test::mmpp2(), test::mmpp2_service());
    CHECK(r.stable);
    CHECK_THAT(r.load, WithinRel(0.80367575890893, 1e-10));
}

TEST_CASE("margin changes sign where the mixture mean crosses the mean interarrival time", "[stability][property]") {
    const MapModel m = test::mmpp2();
    // real arrival rate times mean service equals one at the boundary
    double lo = 0.01, hi = 1000.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const ServiceMixture svc{RationalLst::exponential(3.0), HeavyTailFamily::abate_whitt(1.0 / mid), 0.01};
        (stability(m, svc).margin > 0.0 ? lo : hi) = mid;
    }
    const ServiceMixture at{RationalLst::exponential(3.0), HeavyTailFamily::abate_whitt(1.0 / lo), 0.01};
    CHECK_THAT(stability(m, at).load, WithinAbs(1.0, 1e-9));
}

TEST_CASE("zero mean service leaves the full margin", "[stability]") {
    const MapModel m = test::poisson(4.0);
    CHECK_THAT(stability_margin(m, 0.0), WithinRel(0.25, 1e-14));
    const StabilityReport r = stability(m, {RationalLst::exponential(1e12), HeavyTailFamily::abate_whitt(1e12), 0.0});
    CHECK(r.stable);
    CHECK(r.load < 1e-11);
}

TEST_CASE("waiting-time weights", "[waiting_weight]") {
    const Eigen::VectorXd w = waiting_weight(test::alternating(1.3));
    CHECK_THAT(w(0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(w(1), WithinAbs(2.0, 1e-14));
    CHECK_THAT(waiting_weight(test::poisson(0.4))(0), WithinAbs(1.0, 1e-15));
    const MapModel m = test::mmpp2();
    CHECK_THAT(m.pi.dot(waiting_weight(m)), WithinAbs(1.0, 1e-14));
}

TEST_CASE("waiting-time weights need real arrivals", "[waiting_weight]") {
    MapModel m = test::alternating(1.0);
    m.d2.setZero();
    CHECK(code_of([&] { waiting_weight(m); }) == Errc::NoRealArrivals);
}

TEST_CASE("phase-type transform basics", "[service]") {
    const RationalLst e = RationalLst::exponential(3.0);
    CHECK(std::abs(e.lst(0.0) - 1.0) < 1e-15);
    CHECK_THAT(e.mean(), WithinRel(1.0 / 3.0, 1e-14));
    CHECK_THAT(-e.lst_derivative(0.0).real(), WithinRel(e.mean(), 1e-8));
    const RationalLst h(Poly{6.0, 1.0}, Poly{6.0, 5.0, 1.0});
    CHECK_THAT(-h.lst_derivative(0.0).real(), WithinRel(h.mean(), 1e-8));
    CHECK(std::abs(h.excess_lst(1e-9) - 1.0) < 1e-7);
}

TEST_CASE("invalid phase-type transforms are rejected", "[service]") {
    CHECK(code_of([] { RationalLst(Poly{1.0, 1.0}, Poly{1.0, 1.0}); }) == Errc::InvalidService);
    CHECK(code_of([] { RationalLst(Poly{-1.0}, Poly{-1.0, 1.0}); }) == Errc::InvalidService);
    CHECK(code_of([] { RationalLst(Poly{2.0, 1.0}, Poly{2.0, 3.0, 1.0}); }) == Errc::InvalidService);
}

TEST_CASE("long-tailed family: mean, transforms and tails", "[heavy]") {
    for (double kappa : {0.5, 1.0, 2.0, 3.5}) {
        const auto h = HeavyTailFamily::abate_whitt(kappa);
        CHECK_THAT(h.mean(), WithinRel(1.0 / kappa, 1e-15));
        CHECK(std::abs(h.lst(0.0) - 1.0) < 1e-15);
        CHECK(std::abs(h.excess_lst(0.0) - 1.0) < 1e-15);
        CHECK_THAT(-h.lst_derivative(1e-14).real(), WithinRel(h.mean(), 1e-6));
        CHECK(h.excess_tail(0.0) == 1.0);
        double prev = 1.0;
        for (double t = 0.01; t < 500.0; t *= 1.3) {
            const double v = h.excess_tail(t);
            CHECK(v <= prev);
            prev = v;
        }
        for (double t : {0.3, 1.0, 7.0, 40.0, 80.0, 400.0}) {
            const double tail = laplace_invert_numeric([&](cplx s) { return (1.0 - h.lst(s)) / s; }, t);
            const double ex = laplace_invert_numeric([&](cplx s) { return (1.0 - h.excess_lst(s)) / s; }, t);
            CHECK_THAT(h.tail(t), WithinRel(tail, 1e-6));
            CHECK_THAT(h.excess_tail(t), WithinRel(ex, 1e-6));
            const double dt = 1e-5 * t;
            CHECK_THAT(h.density(t), WithinRel((h.tail(t - dt) - h.tail(t + dt)) / (2.0 * dt), 1e-6));
            CHECK_THAT(h.excess_density(t), WithinRel(h.tail(t) / h.mean(), 1e-12));
        }
    }
}

TEST_CASE("excess tail at t = 1 with kappa = 2 matches numerical inversion", "[heavy]") {
    const auto h = heavy_family("abate-whitt", 2.0);
    CHECK_THAT(h.mean(), WithinRel(0.5, 1e-15));
    const double ex = laplace_invert_numeric([&](cplx s) { return (1.0 - h.excess_lst(s)) / s; }, 1.0);
    CHECK_THAT(h.excess_tail(1.0), WithinRel(ex, 1e-6));
}

TEST_CASE("heavy-tail quantiles invert the tail", "[heavy]") {
    const auto h = HeavyTailFamily::abate_whitt(2.0);
    for (double u : {0.9, 0.5, 1e-2, 1e-5, 1e-9}) CHECK_THAT(h.tail(h.quantile_tail(u)), WithinRel(u, 1e-10));
}

TEST_CASE("heavy families by tag", "[heavy]") {
    CHECK(code_of([] { heavy_family("pareto", 2.0); }) == Errc::UnsupportedFamily);
    CHECK(code_of([] { HeavyTailFamily::abate_whitt(-1.0); }) == Errc::InvalidService);
    CHECK(code_of([] { HeavyTailFamily::abate_whitt(2.0).lst(cplx(-1.0, 0.0)); }) == Errc::BranchCutCrossing);
}

TEST_CASE("scaled erfc", "[heavy]") {
    for (double x : {0.0, 0.5, 3.0, 11.9, 12.1, 30.0})
        if (x < 26.0) CHECK_THAT(erfcx(x), WithinRel(std::exp(x * x) * std::erfc(x), 1e-13));
    CHECK_THAT(erfcx(1e4), WithinRel(1.0 / (1e4 * std::sqrt(M_PI)), 1e-8));
}
