#include "cph/laplace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cph/error.hpp"

namespace cph {

double laplace_invert_numeric(const std::function<cplx(cplx)>& F, double t, const EulerParams& params) {
    if (!(t > 0.0)) throw Error(Errc::ConfigError, "numerical inversion needs t > 0");
    const int n = params.terms, m = params.averages;
    const double x = params.a / (2.0 * t);
    const double h = std::numbers::pi / t;
    const double pre = std::exp(params.a / 2.0) / t;

    std::vector<double> partial(static_cast<size_t>(n + m + 1));
    double sum = 0.5 * F(cplx(x, 0.0)).real();
    partial[0] = sum;
    for (int k = 1; k <= n + m; ++k) {
        double term = F(cplx(x, k * h)).real();
        sum += (k % 2 == 0) ? term : -term;
        partial[static_cast<size_t>(k)] = sum;
    }

    auto euler = [&](int start) {
        double acc = 0.0, binom = 1.0;
        for (int j = 0; j <= m; ++j) {
            acc += binom * partial[static_cast<size_t>(start + j)];
            binom = binom * (m - j) / (j + 1);
        }
        return pre * acc / std::pow(2.0, m);
    };
    const double est = euler(n);
    const double prev = euler(n - 1);
    if (!std::isfinite(est) || std::abs(est - prev) > 1e-5 + 1e-3 * std::abs(est)) {
        std::ostringstream os;
        os << "Euler estimates do not settle at t=" << t << " (" << prev << " vs " << est << ")";
        throw Error(Errc::OscillationDetected, os.str());
    }
    return est;
}

}  // namespace cph
