#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cph/cli.hpp"

namespace cph::cli {

std::string format_num(double x) {
    char buf[40];
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

namespace {

std::string fixed(double v, int prec) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<double>& x, const std::vector<Series>& series) {
    const double w = 820, h = 520, left = 80, right = 200, top = 50, bottom = 60;
    const double pw = w - left - right, ph = h - top - bottom;
    double xmin = 1.0, xmax = 10.0, ymin = 0.0, ymax = 0.0;
    if (!x.empty()) {
        xmin = std::max(x.front(), 1e-300);
        xmax = std::max(x.back(), xmin * 10.0);
    }
    for (const auto& s : series)
        for (double v : s.y)
            if (std::isfinite(v)) {
                ymax = std::max(ymax, v);
                ymin = std::min(ymin, v);
            }
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
    auto px = [&](double v) { return left + (std::log10(std::max(v, xmin)) - lx0) / (lx1 - lx0) * pw; };
    auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(std::ceil(lx0 - 1e-9)); d <= static_cast<int>(std::floor(lx1 + 1e-9)); ++d) {
        const double v = std::pow(10.0, d), xp = px(v);
        os << "<line x1=\"" << fixed(xp, 2) << "\" y1=\"" << top << "\" x2=\"" << fixed(xp, 2) << "\" y2=\""
           << top + ph << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << fixed(xp, 2) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
           << tick_label(v) << "</text>\n";
    }
    for (int k = 0; k <= 5; ++k) {
        const double v = ymin + (ymax - ymin) * k / 5.0, yp = py(v);
        os << "<line x1=\"" << left << "\" y1=\"" << fixed(yp, 2) << "\" x2=\"" << left + pw << "\" y2=\""
           << fixed(yp, 2) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << fixed(yp + 4, 2) << "\" text-anchor=\"end\">"
           << fixed(v, 3) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 18 << "\" text-anchor=\"middle\">t</text>\n";
    os << "<text x=\"20\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 20 " << top + ph / 2
       << ")\" text-anchor=\"middle\">P(V &gt; t)</text>\n";
    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        for (size_t j = 0; j < x.size() && j < s.y.size(); ++j) {
            if (!std::isfinite(s.y[j])) continue;
            os << fixed(px(x[j]), 2) << ',' << fixed(py(s.y[j]), 2) << ' ';
        }
        os << "\"/>\n";
        const double ly = top + 20 + 20.0 * static_cast<double>(k);
        os << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 45 << "\" y2=\"" << ly
           << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
           << "/>\n";
        os << "<text x=\"" << left + pw + 52 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

ErrorStats error_stats(const std::vector<double>& exact, const std::vector<double>& corrected,
                       const std::vector<double>& simplified, int tail_points) {
    ErrorStats st;
    const size_t n = std::min({exact.size(), corrected.size(), simplified.size()});
    if (n == 0) return st;
    st.abs_err_corrected_lo = st.abs_err_simplified_lo = INFINITY;
    for (size_t k = 0; k < n; ++k) {
        const double dc = std::abs(exact[k] - corrected[k]), ds = std::abs(exact[k] - simplified[k]);
        st.max_diff_approx = std::max(st.max_diff_approx, std::abs(corrected[k] - simplified[k]));
        st.abs_err_corrected_lo = std::min(st.abs_err_corrected_lo, dc);
        st.abs_err_corrected_hi = std::max(st.abs_err_corrected_hi, dc);
        st.abs_err_simplified_lo = std::min(st.abs_err_simplified_lo, ds);
        st.abs_err_simplified_hi = std::max(st.abs_err_simplified_hi, ds);
    }
    const size_t from = n > static_cast<size_t>(std::max(tail_points, 1)) ? n - static_cast<size_t>(tail_points) : 0;
    for (size_t k = from; k < n; ++k)
        st.tail_rel_err = std::max(st.tail_rel_err, std::abs(exact[k] - corrected[k]) / std::abs(exact[k]));
    return st;
}

std::vector<Curves> compute_curves(const ModelConfig& cfg, const std::vector<double>& grid, bool with_exact,
                                   const SimOptions* sim) {
    const int n = cfg.model.n;
    const size_t g = grid.size();
    const Corrector corr(cfg.model, cfg.service);
    const ApproxResult ar = corr.evaluate(grid);
    const Eigen::VectorXd omega = waiting_weight(cfg.model);

    std::vector<Curves> out(static_cast<size_t>(n) + 2);
    for (int i = 0; i < n; ++i) {
        Curves& c = out[static_cast<size_t>(i)];
        c.label = std::to_string(i + 1);
        c.base = ar.base[static_cast<size_t>(i)];
        c.corrected = ar.corrected[static_cast<size_t>(i)];
        c.simplified = ar.simplified[static_cast<size_t>(i)];
    }
    Curves& total = out[static_cast<size_t>(n)];
    Curves& wait = out[static_cast<size_t>(n) + 1];
    total.label = "total";
    wait.label = "wait";
    total.base.assign(g, 0.0);
    total.corrected.assign(g, 0.0);
    total.simplified.assign(g, 0.0);
    for (int i = 0; i < n; ++i)
        for (size_t k = 0; k < g; ++k) {
            total.base[k] += ar.base[static_cast<size_t>(i)][k];
            total.corrected[k] += ar.corrected[static_cast<size_t>(i)][k];
            total.simplified[k] += ar.simplified[static_cast<size_t>(i)][k];
        }
    wait.base = ar.wait_base;
    wait.corrected = ar.wait_corrected;
    wait.simplified = ar.wait_simplified;

    if (with_exact) {
        const ExactSolution ex = exact_mixture(cfg.model, cfg.service);
        total.exact.assign(g, 0.0);
        wait.exact.assign(g, 0.0);
        for (int i = 0; i < n; ++i) {
            Curves& c = out[static_cast<size_t>(i)];
            c.exact.resize(g);
            for (size_t k = 0; k < g; ++k) {
                c.exact[k] = ex.tail(i, grid[k]);
                total.exact[k] += c.exact[k];
                wait.exact[k] += omega(i) * c.exact[k];
            }
        }
    }
    if (sim) {
        const SimEstimate est = simulate(cfg.model, cfg.service, grid, *sim);
        for (int i = 0; i < n; ++i) {
            out[static_cast<size_t>(i)].simulated = est.tail[static_cast<size_t>(i)];
            out[static_cast<size_t>(i)].sim_se = est.se[static_cast<size_t>(i)];
        }
        total.simulated = est.total_tail;
        total.sim_se = est.total_se;
        wait.simulated = est.wait_tail;
        wait.sim_se = est.wait_se;
    }
    return out;
}

std::string curves_csv(const std::vector<double>& grid, const std::vector<Curves>& curves) {
    const bool ex = !curves.empty() && !curves.front().exact.empty();
    const bool sim = !curves.empty() && !curves.front().simulated.empty();
    std::ostringstream os;
    os << "t,state,base,corrected,simplified";
    if (ex) os << ",exact";
    if (sim) os << ",simulated,sim_se";
    os << '\n';
    for (const auto& c : curves)
        for (size_t k = 0; k < grid.size(); ++k) {
            os << format_num(grid[k]) << ',' << c.label << ',' << format_num(c.base[k]) << ','
               << format_num(c.corrected[k]) << ',' << format_num(c.simplified[k]);
            if (ex) os << ',' << format_num(c.exact[k]);
            if (sim) os << ',' << format_num(c.simulated[k]) << ',' << format_num(c.sim_se[k]);
            os << '\n';
        }
    return os.str();
}

FigureData figure_data(const ModelConfig& cfg, const std::vector<double>& grid, const std::vector<Curves>& curves) {
    FigureData fd;
    fd.grid = grid;
    const Curves& total = curves[static_cast<size_t>(cfg.model.n)];
    fd.base = total.base;
    fd.corrected = total.corrected;
    fd.simplified = total.simplified;
    fd.exact = total.exact;
    fd.load = stability(cfg.model, cfg.service).load;
    fd.stats = error_stats(fd.exact, fd.corrected, fd.simplified);
    return fd;
}

FigureData figure_data(const ModelConfig& cfg, const std::vector<double>& grid) {
    return figure_data(cfg, grid, compute_curves(cfg, grid, true, nullptr));
}

std::vector<CheckResult> figure_checks(const FigureData& fd) {
    const ErrorStats& s = fd.stats;
    return {
        {"load", fd.load, "0.852 +- 0.001", std::abs(fd.load - 0.852) <= 0.001},
        {"max_diff_approx", s.max_diff_approx, "0.00073 +- 0.0002", std::abs(s.max_diff_approx - 0.00073) <= 0.0002},
        {"max_abs_err_corrected", s.abs_err_corrected_hi, "[0.0002, 0.001]",
         s.abs_err_corrected_hi >= 0.0002 && s.abs_err_corrected_hi <= 0.001},
        {"max_abs_err_simplified", s.abs_err_simplified_hi, "[0.0004, 0.002]",
         s.abs_err_simplified_hi >= 0.0004 && s.abs_err_simplified_hi <= 0.002},
        {"tail_rel_err", s.tail_rel_err, "< 0.04", s.tail_rel_err < 0.04},
    };
}

}  // namespace cph::cli
