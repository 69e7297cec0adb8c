#include "cph/model.hpp"

#include <cmath>
#include <queue>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

namespace {

bool strongly_connected(const Eigen::MatrixXd& p) {
    const int n = static_cast<int>(p.rows());
    auto reach_all = [&](bool transpose) {
        std::vector<bool> seen(static_cast<size_t>(n), false);
        std::queue<int> q;
        q.push(0);
        seen[0] = true;
        int count = 1;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            for (int j = 0; j < n; ++j) {
                double w = transpose ? p(j, i) : p(i, j);
                if (w > 0.0 && !seen[static_cast<size_t>(j)]) {
                    seen[static_cast<size_t>(j)] = true;
                    ++count;
                    q.push(j);
                }
            }
        }
        return count == n;
    };
    return reach_all(false) && reach_all(true);
}

}  // namespace

MapModel build_map(const Eigen::MatrixXd& d1_in, const Eigen::MatrixXd& d2) {
    const int n = static_cast<int>(d1_in.rows());
    if (n < 1 || d1_in.cols() != n || d2.rows() != n || d2.cols() != n)
        throw Error(Errc::NotIntensityMatrix, "d1 and d2 must be square matrices of equal size");
    const double scale = std::max(d1_in.cwiseAbs().maxCoeff(), d2.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (d2(i, j) < 0.0) throw Error(Errc::NotIntensityMatrix, "d2 has a negative entry");
            if (i != j && d1_in(i, j) < 0.0) throw Error(Errc::NotIntensityMatrix, "d1 has a negative off-diagonal entry");
        }
    for (int i = 0; i < n; ++i) {
        double row = d1_in.row(i).sum() + d2.row(i).sum();
        if (std::abs(row) > 1e-10 * std::max(scale, 1.0)) {
            std::ostringstream os;
            os << "row " << i << " of d1 + d2 sums to " << row;
            throw Error(Errc::NotIntensityMatrix, os.str());
        }
    }

    MapModel m;
    m.n = n;
    m.d1 = d1_in;
    m.d2 = d2;
    m.lambda.resize(n);
    for (int i = 0; i < n; ++i) {
        double out = d2.row(i).sum();
        for (int k = 0; k < n; ++k)
            if (k != i) out += d1_in(i, k);
        if (!(out > 0.0)) throw Error(Errc::ZeroExitRate, "state has zero exit rate");
        m.lambda(i) = out;
        m.d1(i, i) = -out;
    }

    m.p = Eigen::MatrixXd::Zero(n, n);
    m.q1 = Eigen::MatrixXd::Zero(n, n);
    m.q2 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double dummy = (i == j) ? 0.0 : m.d1(i, j);
            const double total = dummy + d2(i, j);
            m.p(i, j) = total / m.lambda(i);
            if (total > 0.0) {
                m.q1(i, j) = dummy / total;
                m.q2(i, j) = d2(i, j) / total;
            }
        }
    if (!strongly_connected(m.p)) throw Error(Errc::ReducibleChain, "jump chain is not irreducible");

    Eigen::MatrixXd a = m.p.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    m.pi = a.fullPivLu().solve(rhs).transpose();
    return m;
}

MapModel build_mmpp(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& p) {
    const int n = static_cast<int>(lambda.size());
    Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, n), d2 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (i != j) d1(i, j) = lambda(i) * p(i, j);
        d2(i, i) = lambda(i) * p(i, i);
        d1(i, i) = -lambda(i);
    }
    return build_map(d1, d2);
}

double stability_margin(const MapModel& m, double mean_service) {
    const Eigen::VectorXd inv = m.lambda.cwiseInverse();
    const Eigen::VectorXd real_frac = m.a2().rowwise().sum();
    return m.pi.dot(inv) - mean_service * m.pi.dot(real_frac);
}

StabilityReport stability(const MapModel& m, const ServiceMixture& svc) {
    StabilityReport r;
    const double mu = svc.mean();
    r.margin = stability_margin(m, mu);
    const double cycle = m.pi.dot(m.lambda.cwiseInverse());
    r.load = mu * m.pi.dot(m.a2().rowwise().sum()) / cycle;
    r.stable = r.margin > 0.0;
    return r;
}

Eigen::VectorXd waiting_weight(const MapModel& m) {
    const Eigen::VectorXd v = m.lambda.cwiseInverse().asDiagonal() * m.d2.rowwise().sum();
    const double norm = m.pi.dot(v);
    if (!(norm > 0.0)) throw Error(Errc::NoRealArrivals, "the arrival process has no real arrivals");
    return v / norm;
}

}  // namespace cph
