#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "cph/error.hpp"
#include "cph/oracle.hpp"

namespace cph {

namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse of a monotone tail given as an exponential-polynomial measure.
double invert_mix_tail(const ExpPolyMix& mix, double u) {
    if (u >= mix.tail(0.0).real()) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (mix.tail_real(hi) > u) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw Error(Errc::NoConvergence, "service quantile could not be bracketed");
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = mix.tail_real(x) - u;
        if (f > 0.0) lo = x; else hi = x;
        const double d = -mix.density(x).real();
        double next = d < 0.0 ? x - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * std::max(1.0, x) || hi - lo <= 1e-14 * hi) return next;
        x = next;
    }
    return x;
}

int thread_cap(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CPH_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct RepCounts {
    /// [batch][state][bucket]
    std::vector<std::vector<std::vector<std::int64_t>>> state;
    /// [batch][bucket]
    std::vector<std::vector<std::int64_t>> wait;
    std::vector<std::int64_t> arrivals, reals;
};

RepCounts run_rep(const MapModel& m, const ServiceSampler& service, const std::vector<double>& grid,
                  const SimOptions& opt, int rep, int batches) {
    const int n = m.n;
    const size_t g = grid.size();
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed & 0xffffffffu), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(rep)};
    std::mt19937_64 rng(seq);

    RepCounts rc;
    rc.state.assign(static_cast<size_t>(batches),
                    std::vector<std::vector<std::int64_t>>(static_cast<size_t>(n), std::vector<std::int64_t>(g + 1)));
    rc.wait.assign(static_cast<size_t>(batches), std::vector<std::int64_t>(g + 1));
    rc.arrivals.assign(static_cast<size_t>(batches), 0);
    rc.reals.assign(static_cast<size_t>(batches), 0);

    std::vector<std::vector<double>> cum(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) cum[static_cast<size_t>(i)].push_back(acc += m.p(i, j));
        cum[static_cast<size_t>(i)].back() = 1.0;
    }

    const std::int64_t warm = static_cast<std::int64_t>(opt.warmup_fraction * static_cast<double>(opt.arrivals));
    const std::int64_t kept = opt.arrivals - warm;
    int i = 0;
    double w = 0.0;
    for (std::int64_t idx = 0; idx < opt.arrivals; ++idx) {
        const double t = -std::log(1.0 - u01(rng)) / m.lambda(i);
        const double v = std::max(w - t, 0.0);
        const double pick = u01(rng);
        const auto& row = cum[static_cast<size_t>(i)];
        const int j = static_cast<int>(std::upper_bound(row.begin(), row.end(), pick) - row.begin());
        const double q2 = m.q2(i, j);
        const bool real = q2 >= 1.0 || (q2 > 0.0 && u01(rng) < q2);
        const std::int64_t rec = idx - warm;
        size_t bucket = 0;
        size_t b = 0;
        if (rec >= 0) {
            bucket = static_cast<size_t>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
            b = static_cast<size_t>(std::min<std::int64_t>(rec * batches / kept, batches - 1));
            ++rc.state[b][static_cast<size_t>(i)][bucket];
            ++rc.arrivals[b];
        }
        w = v;
        if (real) {
            w += service(rng);
            if (rec >= 0) {
                ++rc.wait[b][bucket];
                ++rc.reals[b];
            }
        }
        if (!std::isfinite(w)) throw Error(Errc::UnstableSimulation, "workload diverged");
        i = j;
    }
    return rc;
}

/// Fraction of counted values above each grid point.
std::vector<double> exceed(const std::vector<std::int64_t>& buckets, std::int64_t total) {
    const size_t g = buckets.size() - 1;
    std::vector<double> out(g, 0.0);
    std::int64_t above = 0;
    for (size_t k = g; k-- > 0;) {
        above += buckets[k + 1];
        out[k] = total > 0 ? static_cast<double>(above) / static_cast<double>(total) : 0.0;
    }
    return out;
}

void mean_se(const std::vector<std::vector<double>>& samples, std::vector<double>& mean, std::vector<double>& se) {
    const size_t r = samples.size(), g = samples.front().size();
    mean.assign(g, 0.0);
    se.assign(g, 0.0);
    for (const auto& s : samples)
        for (size_t k = 0; k < g; ++k) mean[k] += s[k] / static_cast<double>(r);
    if (r < 2) return;
    for (const auto& s : samples)
        for (size_t k = 0; k < g; ++k) se[k] += (s[k] - mean[k]) * (s[k] - mean[k]);
    for (size_t k = 0; k < g; ++k) se[k] = std::sqrt(se[k] / static_cast<double>(r - 1) / static_cast<double>(r));
}

}  // namespace

ServiceSampler mixture_sampler(const ServiceMixture& svc) {
    const RationalLst phase = svc.phase;
    const HeavyTailFamily heavy = svc.heavy;
    const double eps = svc.epsilon;
    const bool expo = phase.order() == 1 && phase.q().degree() == 0;
    const double rate = expo ? phase.p()[0].real() : 0.0;
    return [=](std::mt19937_64& rng) {
        if (eps > 0.0 && u01(rng) < eps) return heavy.quantile_tail(1.0 - u01(rng));
        const double u = 1.0 - u01(rng);
        if (expo) return -std::log(u) / rate;
        return invert_mix_tail(phase.service(), u);
    };
}

SimEstimate simulate(const MapModel& m, const ServiceMixture& svc, const std::vector<double>& grid,
                     const SimOptions& opt) {
    if (!(stability_margin(m, svc.mean()) > 0.0))
        throw Error(Errc::UnstableSimulation, "the workload process has no stationary regime");
    return simulate(m, mixture_sampler(svc), grid, opt);
}

SimEstimate simulate(const MapModel& m, const ServiceSampler& service, const std::vector<double>& grid,
                     const SimOptions& opt) {
    if (opt.reps < 1 || opt.arrivals < 10) throw Error(Errc::ConfigError, "simulation needs reps >= 1 and arrivals >= 10");
    if (!std::is_sorted(grid.begin(), grid.end())) throw Error(Errc::ConfigError, "grid must be increasing");
    const int batches = opt.reps == 1 ? std::max(2, opt.batches) : 1;
    std::vector<RepCounts> counts(static_cast<size_t>(opt.reps));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto worker = [&] {
        for (int r = next++; r < opt.reps; r = next++) {
            try {
                counts[static_cast<size_t>(r)] = run_rep(m, service, grid, opt, r, batches);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nt = std::min(thread_cap(opt.threads), opt.reps);
    std::vector<std::thread> pool;
    for (int k = 1; k < nt; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    const int n = m.n;
    SimEstimate est;
    est.grid = grid;
    est.reps = opt.reps;
    est.seed = opt.seed;
    est.tail.resize(static_cast<size_t>(n));
    est.se.resize(static_cast<size_t>(n));
    std::vector<std::vector<double>> wait_samples, total_samples;
    std::vector<std::vector<std::vector<double>>> state_samples(static_cast<size_t>(n));
    for (const auto& rc : counts)
        for (size_t b = 0; b < rc.arrivals.size(); ++b) {
            wait_samples.push_back(exceed(rc.wait[b], rc.reals[b]));
            std::vector<std::int64_t> all(grid.size() + 1, 0);
            for (int i = 0; i < n; ++i)
                for (size_t k = 0; k < all.size(); ++k) all[k] += rc.state[b][static_cast<size_t>(i)][k];
            total_samples.push_back(exceed(all, rc.arrivals[b]));
            for (int i = 0; i < n; ++i)
                state_samples[static_cast<size_t>(i)].push_back(
                    exceed(rc.state[b][static_cast<size_t>(i)], rc.arrivals[b]));
        }
    mean_se(wait_samples, est.wait_tail, est.wait_se);
    mean_se(total_samples, est.total_tail, est.total_se);
    for (int i = 0; i < n; ++i)
        mean_se(state_samples[static_cast<size_t>(i)], est.tail[static_cast<size_t>(i)], est.se[static_cast<size_t>(i)]);
    return est;
}

}  // namespace cph
