#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cph/model.hpp"

namespace cph::test {

/// Two states, exit rate lam; the 1 -> 2 jump is a dummy, the 2 -> 1 jump a real arrival (Erlang-2 arrivals).
inline MapModel alternating(double lam) {
    Eigen::MatrixXd d1(2, 2), d2(2, 2);
    d1 << -lam, lam, 0.0, -lam;
    d2 << 0.0, 0.0, lam, 0.0;
    return build_map(d1, d2);
}

inline MapModel poisson(double rate) {
    Eigen::MatrixXd d1(1, 1), d2(1, 1);
    d1 << -rate;
    d2 << rate;
    return build_map(d1, d2);
}

/// Two-state MMPP with rates 7 and 1/2 and stay probabilities 8/9 and 3/100.
inline MapModel mmpp2() {
    Eigen::VectorXd lambda(2);
    lambda << 7.0, 0.5;
    Eigen::MatrixXd p(2, 2);
    p << 8.0 / 9.0, 1.0 / 9.0, 0.97, 0.03;
    return build_mmpp(lambda, p);
}

inline ServiceMixture mmpp2_service(double eps = 0.01, double kappa = 2.0) {
    return {RationalLst::exponential(3.0), HeavyTailFamily::abate_whitt(kappa), eps};
}

/// Dense random MAP with every transition present; real arrivals on a random subset of entries.
inline MapModel random_map(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    std::bernoulli_distribution real(0.5);
    Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, n), d2 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r = u(rng);
            if (i == j) {
                if (real(rng)) d2(i, j) = r;
            } else if (real(rng)) {
                d2(i, j) = r;
            } else {
                d1(i, j) = r;
            }
        }
    if (d2.sum() == 0.0) d2(0, 0) = 1.0;
    for (int i = 0; i < n; ++i) d1(i, i) = -(d1.row(i).sum() + d2.row(i).sum());
    return build_map(d1, d2);
}

/// Two-point log-log slope of err against eps.
inline double slope(double eps1, double err1, double eps2, double err2) {
    return std::log(err1 / err2) / std::log(eps1 / eps2);
}

inline double rel_diff(std::complex<double> a, std::complex<double> b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace cph::test
