#pragma once

#include <Eigen/Dense>

#include "cph/heavytail.hpp"
#include "cph/rational_lst.hpp"

namespace cph {

/// Markovian arrival process split into dummy (d1) and real (d2) transitions.
struct MapModel {
    int n = 0;
    Eigen::MatrixXd d1, d2;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd p, q1, q2;
    /// Stationary distribution of the embedded jump chain.
    Eigen::RowVectorXd pi;

    /// Q1 o P and Q2 o P
    Eigen::MatrixXd a1() const { return q1.cwiseProduct(p); }
    Eigen::MatrixXd a2() const { return q2.cwiseProduct(p); }
};

MapModel build_map(const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2);

/// MMPP from exit rates and jump matrix: diagonal jumps carry real arrivals.
MapModel build_mmpp(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& p);

/// (1 - eps) phase + eps heavy.
struct ServiceMixture {
    RationalLst phase;
    HeavyTailFamily heavy;
    double epsilon = 0.0;

    double mean() const { return (1.0 - epsilon) * phase.mean() + epsilon * heavy.mean(); }
    cplx lst(cplx s) const { return (1.0 - epsilon) * phase.lst(s) + epsilon * heavy.lst(s); }
    cplx lst_derivative(cplx s) const {
        return (1.0 - epsilon) * phase.lst_derivative(s) + epsilon * heavy.lst_derivative(s);
    }
    ServiceMixture with_epsilon(double eps) const { return {phase, heavy, eps}; }
};

struct StabilityReport {
    double margin = 0.0;
    double load = 0.0;
    bool stable = false;
};

/// Margin pi (Lambda^-1 - mu Q2 o P) e with the given mean service time.
double stability_margin(const MapModel& m, double mean_service);
StabilityReport stability(const MapModel& m, const ServiceMixture& svc);

/// Weights turning per-state workload transforms into the waiting-time transform of a real customer.
Eigen::VectorXd waiting_weight(const MapModel& m);

}  // namespace cph
