#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "cph/basesolver.hpp"
#include "cph/error.hpp"
#include "cph/quadrature.hpp"
#include "support.hpp"

using namespace cph;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Service rate giving the requested load with Erlang-k service.
RationalLst erlang_for_load(const MapModel& m, int k, double load) {
    const double rate_one = stability(m, {RationalLst::exponential(1.0), HeavyTailFamily::abate_whitt(1.0), 0.0}).load;
    return RationalLst::erlang(k, k * rate_one / load);
}

/// Three-state cycle, one real arrival per cycle.
MapModel cycle3(double lam) {
    Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(3, 3), d2 = Eigen::MatrixXd::Zero(3, 3);
    d1(0, 0) = d1(1, 1) = d1(2, 2) = -lam;
    d1(0, 1) = d1(1, 2) = lam;
    d2(2, 0) = lam;
    return build_map(d1, d2);
}

void check_invariants(const MapModel& m, const RationalLst& ph) {
    const BaseSolution b = solve_base(m, ph);
    const int n = m.n;
    CHECK(static_cast<int>(b.s_roots.size()) == n);
    int neg = 0;
    for (const auto& x : b.x_roots) {
        CHECK(x.value.real() > 0.0);
        neg += x.multiplicity;
    }
    CHECK(neg == b.r * ph.order());
    CHECK(b.char_poly.degree() == n + b.r * ph.order());
    cplx phi_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        phi_sum += b.phi(i, 0.0);
        CHECK(std::abs(b.phi(i, 0.0) - m.pi(i)) < 1e-9);
        CHECK(std::abs(b.phi(i, 1e9) - b.u(i)) < 1e-6);
        CHECK_THAT(b.tail(i, 0.0) + b.u(i), WithinAbs(m.pi(i), 1e-9));
        double prev = b.tail(i, 0.0);
        for (double t = 0.01; t < 200.0; t *= 1.5) {
            const double v = b.tail(i, t);
            CHECK(v <= prev + 1e-12);
            CHECK(v >= -1e-12);
            prev = v;
        }
    }
    CHECK(std::abs(phi_sum - 1.0) < 1e-9);
    CHECK_THAT(b.u.dot(m.lambda.cwiseInverse()), WithinRel(b.margin, 1e-9));
    for (const auto& a : b.a_vecs) CHECK(std::abs(b.u.cast<cplx>().dot(a.a)) < 1e-9 * a.a.norm());
}

}  // namespace

TEST_CASE("characteristic polynomial of the alternating MAP with exponential service", "[char]") {
    for (double lam : {1.0, 0.7}) {
        const double nu = 3.0;
        const Poly c = assemble_char_poly(detsym(test::alternating(lam)), RationalLst::exponential(nu));
        const Poly expected{0.0, lam * lam - 2.0 * lam * nu, nu - 2.0 * lam, 1.0};
        REQUIRE(c.degree() == 3);
        for (int k = 0; k <= 3; ++k) CHECK(std::abs(c[k] - expected[k]) < 1e-12);
    }
}

TEST_CASE("root classes of the alternating MAP", "[roots]") {
    const BaseSolution b = solve_base(test::alternating(1.0), RationalLst::exponential(3.0));
    REQUIRE(b.s_roots.size() == 2);
    CHECK(b.s_roots[0] == 0.0);
    CHECK_THAT(b.s_roots[1].real(), WithinRel((-1.0 + std::sqrt(21.0)) / 2.0, 1e-12));
    REQUIRE(b.x_roots.size() == 1);
    CHECK_THAT(b.x_roots[0].value.real(), WithinRel((1.0 + std::sqrt(21.0)) / 2.0, 1e-12));
}

TEST_CASE("too many roots in the right half plane signal instability", "[roots]") {
    // lam = 1, mean service 2.5: s (s^2 - 1.6 s + 0.2)
    const Poly c = assemble_char_poly(detsym(test::alternating(1.0)), RationalLst::exponential(0.4));
    try {
        classify_roots(c, 2);
        FAIL("expected WrongRootCount");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::WrongRootCount);
    }
    CHECK_THROWS_AS(solve_base(test::alternating(1.0), RationalLst::exponential(0.4)), Error);
}

TEST_CASE("conjugate pair of positive roots", "[roots]") {
    const MapModel m = cycle3(1.0);
    const BaseSolution b = solve_base(m, RationalLst::exponential(1.0));
    REQUIRE(b.s_roots.size() == 3);
    CHECK(std::abs(b.s_roots[1].imag()) > 1e-3);
    CHECK(std::abs(b.s_roots[1] - std::conj(b.s_roots[2])) < 1e-10);
    CHECK(b.u.allFinite());
    check_invariants(m, RationalLst::exponential(1.0));
}

TEST_CASE("adjugate column at the positive root", "[eigvec]") {
    const double lam = 1.0;
    const MapModel m = test::alternating(lam);
    const BaseSolution b = solve_base(m, RationalLst::exponential(3.0));
    const cplx s2 = b.s_roots[1];
    const EigvecA& a = b.a_vecs[0];
    // the second column (-lam, s2 - lam) has the larger norm
    CHECK(a.m_col == 1);
    CHECK(std::abs(a.a(0) + lam) < 1e-12);
    CHECK(std::abs(a.a(1) - (s2 - lam)) < 1e-12);
    const Eigen::MatrixXcd e = eval_E(m, RationalLst::exponential(3.0).lst(s2), s2);
    CHECK((e * a.a).norm() < 1e-8 * e.norm() * a.a.norm());
    // any multiple of a gives the same constraint on u
    CHECK(std::abs(b.u.cast<cplx>().dot(2.0 * a.a)) < 1e-12);
}

TEST_CASE("u of the alternating MAP follows its closed form", "[u]") {
    for (double lam : {1.0, 0.6}) {
        const double nu = 3.0, mu = 1.0 / nu;
        const BaseSolution b = solve_base(test::alternating(lam), RationalLst::exponential(nu));
        const double s2 = b.s_roots[1].real(), rho = lam * mu / 2.0;
        CHECK_THAT(b.u(0), WithinRel((1.0 - lam / s2) * (1.0 - rho), 1e-10));
        CHECK_THAT(b.u(1), WithinRel((lam / s2) * (1.0 - rho), 1e-10));
        CHECK_THAT(b.u.sum(), WithinRel(1.0 - rho, 1e-10));
    }
    const BaseSolution b = solve_base(test::alternating(1.0), RationalLst::exponential(3.0));
    CHECK_THAT(b.u(0), WithinAbs(0.36813, 5e-5));
    CHECK_THAT(b.u(1), WithinAbs(0.46521, 5e-5));
}

TEST_CASE("waiting time of the alternating MAP", "[workload]") {
    const BaseSolution b = solve_base(test::alternating(1.0), RationalLst::exponential(3.0));
    const Eigen::VectorXd w = waiting_weight(test::alternating(1.0));
    // w(s) = 2 u_2 (s + y) / (s + x): single x and y after cancelling s (s - s2)
    REQUIRE(b.y_roots[1].size() == 1);
    for (double s : {0.1, 1.0, 5.0}) {
        const cplx expected = 2.0 * b.u(1) * (s + b.y_roots[1][0].value) / (s + b.x_roots[0].value);
        CHECK(test::rel_diff(w(0) * b.phi(0, s) + w(1) * b.phi(1, s), expected) < 1e-10);
    }
}

TEST_CASE("M/M/1 waiting time", "[workload]") {
    const double rho = 0.7, nu = 1.0;
    const BaseSolution b = solve_base(test::poisson(rho * nu), RationalLst::exponential(nu));
    for (double t : {0.0, 1.0, 3.0, 5.0, 20.0}) CHECK_THAT(b.tail(0, t), WithinRel(rho * std::exp(-nu * (1.0 - rho) * t), 1e-10));
    CHECK_THAT(b.u(0), WithinRel(1.0 - rho, 1e-12));
}

TEST_CASE("two-state MMPP base solution", "[workload]") {
    const MapModel m = test::mmpp2();
    const BaseSolution b = solve_base(m, RationalLst::exponential(3.0));
    CHECK_THAT(b.s_roots[1].real(), WithinRel(4.65097, 1e-5));
    CHECK_THAT(b.u(0), WithinRel(0.0488953, 1e-5));
    CHECK_THAT(b.u(1), WithinRel(0.0299338, 1e-5));
    check_invariants(m, RationalLst::exponential(3.0));
}

TEST_CASE("tails round-trip through a numerical transform", "[workload][property]") {
    const MapModel m = test::mmpp2();
    const BaseSolution b = solve_base(m, RationalLst::erlang(2, 6.0));
    for (int i = 0; i < m.n; ++i)
        for (double s : {0.1, 0.5, 2.0, 10.0}) {
            const double num = integrate([&](double t) { return std::exp(-s * t) * b.tail(i, t); }, 0.0,
                                         std::numeric_limits<double>::infinity(), 1e-12, 1e-16);
            CHECK(test::rel_diff(num, (m.pi(i) - b.phi(i, s)) / s) < 1e-7);
        }
}

TEST_CASE("structural invariants on random MAPs", "[workload][property]") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + trial % 4;
        const MapModel m = test::random_map(n, rng);
        check_invariants(m, erlang_for_load(m, 1 + trial % 3, 0.6));
    }
}

TEST_CASE("unstable model is rejected", "[workload]") {
    try {
        solve_base(test::poisson(1.2), RationalLst::exponential(1.0));
        FAIL("expected Unstable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Unstable);
    }
}
