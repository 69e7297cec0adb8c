#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cph/basesolver.hpp"
#include "cph/laplace.hpp"
#include "cph/model.hpp"

namespace cph {

/// Workload solution of the mixture model computed without any expansion in epsilon.
class ExactSolution {
public:
    ExactSolution(const MapModel& m, const ServiceMixture& svc, std::vector<cplx> roots, Eigen::VectorXd u);

    const std::vector<cplx>& roots() const { return roots_; }
    const Eigen::VectorXd& u() const { return u_; }
    const MapModel& model() const { return m_; }
    const ServiceMixture& service() const { return svc_; }

    /// E_eps(s) with the true mixture transform.
    Eigen::MatrixXcd matrix(cplx s) const;
    /// Row vector s u E_eps(s)^-1; points close to a root are averaged over a small circle.
    Eigen::VectorXcd phi(cplx s) const;
    /// P(V_i > t) by numerical inversion.
    double tail(int i, double t) const;
    /// P(V_i > t) minus the phase-type base tail, inverted as one transform.
    double tail_minus_base(int i, double t, const BaseSolution& base) const;
    /// Euler parameters used by the tail evaluators.
    EulerParams euler;

private:
    Eigen::VectorXcd phi_direct(cplx s) const;

    MapModel m_;
    ServiceMixture svc_;
    std::vector<cplx> roots_;
    Eigen::VectorXd u_;
};

/// Newton on det E_eps from the first-order guesses; numeric adjugate columns; the linear system for u.
/// Throws Unstable, RootDivergence.
ExactSolution exact_mixture(const MapModel& m, const ServiceMixture& svc);
/// Same, starting Newton from the given guesses (zero root excluded).
ExactSolution exact_mixture(const MapModel& m, const ServiceMixture& svc, const std::vector<cplx>& guesses);

/// Draws a service time given a uniform source.
using ServiceSampler = std::function<double(std::mt19937_64&)>;

/// Sampler for the mixture: phase-type with prob. 1 - eps, heavy with prob. eps.
ServiceSampler mixture_sampler(const ServiceMixture& svc);

struct SimOptions {
    std::int64_t arrivals = 1000000;
    double warmup_fraction = 0.1;
    int reps = 20;
    std::uint64_t seed = 12345;
    int batches = 32;
    /// Caps the worker threads; 0 reads CPH_THREADS, defaulting to the hardware count.
    int threads = 0;
};

struct SimEstimate {
    std::vector<double> grid;
    /// [state][grid point]: joint P(V > t, arrival in state i) over all arrivals.
    std::vector<std::vector<double>> tail, se;
    /// All arrivals regardless of state.
    std::vector<double> total_tail, total_se;
    /// Waiting time of real customers.
    std::vector<double> wait_tail, wait_se;
    int reps = 0;
    std::uint64_t seed = 0;
};

/// Lindley recursion at arrival epochs of the embedded chain.  Throws UnstableSimulation.
SimEstimate simulate(const MapModel& m, const ServiceMixture& svc, const std::vector<double>& grid,
                     const SimOptions& opt = {});
SimEstimate simulate(const MapModel& m, const ServiceSampler& service, const std::vector<double>& grid,
                     const SimOptions& opt);

}  // namespace cph
